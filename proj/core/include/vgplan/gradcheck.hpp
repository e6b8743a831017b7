#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vgplan/transformer.hpp"

namespace vgplan {

// Per-parameter relative error |a - n| / max(|a| + |n|, floor), where a is
// the analytic and n the central-difference derivative.
constexpr double kGradCheckFloor = 1e-7;

struct GroupError {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_group;
  std::vector<GroupError> groups;
};

// Called with the analytic gradient before comparison (fault injection).
using GradTamper = std::function<void(std::span<double>)>;

// Central differences of `loss` (evaluated at the current `params`) against
// `analytic`, group by group. `params` is perturbed in place and restored.
GradCheckResult gradient_check(std::span<double> params, std::span<const double> analytic,
                               const std::vector<ParamGroup>& groups,
                               const std::function<double()>& loss, double step = 1e-4);

GradCheckResult gradient_check_lm(Transformer<double>& model, const std::vector<LmExample>& batch,
                                  double step = 1e-4, const GradTamper& tamper = {});
GradCheckResult gradient_check_classifier(Transformer<double>& model,
                                          const std::vector<ClsExample>& batch, double step = 1e-4,
                                          const GradTamper& tamper = {});

// Y = X·W + b scored by a fixed random linear functional: an affine loss for
// which central differences are exact up to rounding.
GradCheckResult gradient_check_affine(std::size_t m, std::size_t k, std::size_t n, Rng& rng,
                                      double step = 1e-4);

// Replaces every parameter with random values of moderate size (gains near
// 1), so no gradient is structurally zero.
void randomize_for_gradcheck(Transformer<double>& model, Rng& rng);

}  // namespace vgplan
