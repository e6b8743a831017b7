#pragma once

#include <span>
#include <vector>

#include "vgplan/rng.hpp"
#include "vgplan/vocabulary.hpp"

namespace vgplan {

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 0.99;
  int max_tokens = 192;  // completion budget per transition

  // Throws ConfigError.
  void validate() const;
};

// Temperatures below this are treated as the greedy limit.
constexpr double kGreedyTemperature = 1e-6;

// The distribution sample_token draws from: softmax(logits / tau), cut to the
// smallest set of most-likely tokens whose mass reaches top_p (ties broken
// by lower id), renormalized. Entries outside the nucleus are exactly 0.
template <class T>
std::vector<double> nucleus_distribution(std::span<const T> logits, const SamplingParams& params);

template <class T>
TokenId sample_token(std::span<const T> logits, const SamplingParams& params, Rng& rng);

}  // namespace vgplan
