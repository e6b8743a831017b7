#include "vgplan/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vgplan/errors.hpp"

namespace vgplan {

void SamplingParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and > 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must lie in (0, 1]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
}

namespace {

template <class T>
std::size_t argmax(std::span<const T> logits) {
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace

template <class T>
std::vector<double> nucleus_distribution(std::span<const T> logits, const SamplingParams& params) {
  const std::size_t v = logits.size();
  std::vector<double> probs(v, 0.0);
  if (v == 0) return probs;
  if (params.temperature < kGreedyTemperature) {
    probs[argmax(logits)] = 1.0;
    return probs;
  }
  const double mx = static_cast<double>(logits[argmax(logits)]);
  double denom = 0.0;
  for (std::size_t i = 0; i < v; ++i) {
    probs[i] = std::exp((static_cast<double>(logits[i]) - mx) / params.temperature);
    denom += probs[i];
  }
  for (auto& p : probs) p /= denom;

  std::vector<std::size_t> order(v);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  // Inclusive prefix; the slack absorbs rounding in the running sum so that
  // e.g. {0.5, 0.3, ...} with p = 0.8 stops after two tokens.
  double mass = 0.0;
  std::size_t keep = 0;
  while (keep < v) {
    mass += probs[order[keep++]];
    if (mass >= params.top_p - 1e-12) break;
  }
  std::vector<double> out(v, 0.0);
  for (std::size_t i = 0; i < keep; ++i) out[order[i]] = probs[order[i]] / mass;
  return out;
}

template <class T>
TokenId sample_token(std::span<const T> logits, const SamplingParams& params, Rng& rng) {
  if (logits.empty()) throw ShapeMismatch("empty logit vector");
  if (params.temperature < kGreedyTemperature) return static_cast<TokenId>(argmax(logits));
  const auto probs = nucleus_distribution(logits, params);
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i];
    if (u < acc) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last);  // u landed in the rounding gap at the top
}

template std::vector<double> nucleus_distribution<float>(std::span<const float>, const SamplingParams&);
template std::vector<double> nucleus_distribution<double>(std::span<const double>, const SamplingParams&);
template TokenId sample_token<float>(std::span<const float>, const SamplingParams&, Rng&);
template TokenId sample_token<double>(std::span<const double>, const SamplingParams&, Rng&);

}  // namespace vgplan
