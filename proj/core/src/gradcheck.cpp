#include "vgplan/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vgplan/errors.hpp"
#include "vgplan/kernels.hpp"

namespace vgplan {

GradCheckResult gradient_check(std::span<double> params, std::span<const double> analytic,
                               const std::vector<ParamGroup>& groups,
                               const std::function<double()>& loss, double step) {
  if (analytic.size() != params.size()) throw ShapeMismatch("gradient size mismatch");
  GradCheckResult out;
  for (const auto& g : groups) {
    GroupError ge{g.name, 0.0, 0};
    for (std::size_t i = g.offset; i < g.offset + g.size; ++i) {
      const double saved = params[i];
      params[i] = saved + step;
      const double up = loss();
      params[i] = saved - step;
      const double down = loss();
      params[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[i];
      const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), kGradCheckFloor);
      ge.max_rel_error = std::max(ge.max_rel_error, rel);
      ++ge.checked;
    }
    if (ge.max_rel_error >= out.max_rel_error) {
      out.max_rel_error = ge.max_rel_error;
      out.worst_group = ge.name;
    }
    out.groups.push_back(std::move(ge));
  }
  return out;
}

namespace {

template <class Batch, class LossFn>
GradCheckResult check_model(Transformer<double>& model, const Batch& batch, double step,
                            const GradTamper& tamper, LossFn fn) {
  std::vector<double> grad(model.params().size(), 0.0);
  fn(model, batch, std::span<double>(grad));
  if (tamper) tamper(grad);
  return gradient_check(model.params(), grad, model.layout().groups,
                        [&] { return fn(model, batch, std::span<double>()).loss; }, step);
}

}  // namespace

GradCheckResult gradient_check_lm(Transformer<double>& model, const std::vector<LmExample>& batch,
                                  double step, const GradTamper& tamper) {
  return check_model(model, batch, step, tamper,
                     [](const Transformer<double>& m, const std::vector<LmExample>& b,
                        std::span<double> g) { return lm_loss(m, b, g); });
}

GradCheckResult gradient_check_classifier(Transformer<double>& model,
                                          const std::vector<ClsExample>& batch, double step,
                                          const GradTamper& tamper) {
  return check_model(model, batch, step, tamper,
                     [](const Transformer<double>& m, const std::vector<ClsExample>& b,
                        std::span<double> g) { return classifier_loss(m, b, g); });
}

GradCheckResult gradient_check_affine(std::size_t m, std::size_t k, std::size_t n, Rng& rng,
                                      double step) {
  // params = [W (k×n) | b (n)]
  std::vector<double> params(k * n + n), x(m * k), c(m * n);
  for (auto& v : params) v = rng.normal();
  for (auto& v : x) v = rng.normal();
  for (auto& v : c) v = rng.normal();
  auto loss = [&] {
    std::vector<double> y(m * n);
    kernels::linear_forward(x.data(), m, k, params.data(), n, params.data() + k * n, y.data());
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += c[i] * y[i];
    return s;
  };
  std::vector<double> grad(params.size(), 0.0);
  kernels::linear_backward(x.data(), m, k, params.data(), n, c.data(), static_cast<double*>(nullptr), grad.data(),
                           grad.data() + k * n);
  const std::vector<ParamGroup> groups{{"w", 0, k * n}, {"b", k * n, n}};
  return gradient_check(params, grad, groups, loss, step);
}

void randomize_for_gradcheck(Transformer<double>& model, Rng& rng) {
  auto p = model.params();
  for (auto& v : p) v = 0.3 * rng.normal();
  const auto& lay = model.layout();
  const auto d = static_cast<std::size_t>(model.config().width);
  auto gains = [&](std::size_t off) {
    for (std::size_t i = 0; i < d; ++i) p[off + i] = 1.0 + 0.1 * rng.normal();
  };
  for (const auto& L : lay.layers) {
    gains(L.ln1_g);
    gains(L.ln2_g);
  }
  gains(lay.lnf_g);
}

}  // namespace vgplan
