#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "vgplan/errors.hpp"
#include "vgplan/sampling.hpp"

using namespace vgplan;

TEST(Sampling, NucleusWorkedExample) {
  const std::vector<double> logits{std::log(0.5), std::log(0.3), std::log(0.15), std::log(0.05)};
  const auto d = nucleus_distribution<double>(logits, {1.0, 0.8, 10});
  ASSERT_EQ(d.size(), 4u);
  EXPECT_NEAR(d[0], 0.625, 1e-12);
  EXPECT_NEAR(d[1], 0.375, 1e-12);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);
  // Inclusive prefix: p exactly at a cumulative boundary keeps that token.
  const auto e = nucleus_distribution<double>(logits, {1.0, 0.5, 10});
  EXPECT_NEAR(e[0], 1.0, 1e-12);
}

TEST(Sampling, GreedyLimit) {
  Rng rng(1);
  const std::vector<float> logits{0.1f, 2.0f, 1.99f, -3.0f};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_token<float>(logits, {1e-7, 0.99, 10}, rng), 1);
  // Argmax draws no randomness.
  Rng a(5), b(5);
  sample_token<float>(logits, {0.0, 0.99, 10}, a);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Sampling, FullSoftmaxFrequencies) {
  Rng gen(2);
  std::vector<double> logits(26);
  for (auto& x : logits) x = gen.normal();
  double z = 0;
  for (double x : logits) z += std::exp(x);
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i]) / z;

  const int n = 100000;
  std::vector<int> counts(logits.size(), 0);
  Rng rng(3);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_token<double>(logits, {1.0, 1.0, 10}, rng))];
  double chi2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double expected = n * p[i];
    EXPECT_LE(std::abs(counts[i] - expected), 3 * std::sqrt(n * p[i] * (1 - p[i]))) << i;
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  EXPECT_LT(chi2, 52.62);  // 0.999 quantile, 25 degrees of freedom
}

TEST(Sampling, TemperatureScalesLogits) {
  const std::vector<double> logits{1.0, 0.0, -1.0};
  const auto d = nucleus_distribution<double>(logits, {0.5, 1.0, 10});
  const double z = std::exp(2.0) + 1 + std::exp(-2.0);
  EXPECT_NEAR(d[0], std::exp(2.0) / z, 1e-12);
  EXPECT_NEAR(d[2], std::exp(-2.0) / z, 1e-12);
}

TEST(SamplingProperty, NeverLeavesNucleus) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<float> logits(26);
    for (auto& x : logits) x = static_cast<float>(3 * rng.normal());
    const SamplingParams sp{0.2 + 1.5 * rng.uniform01(), 0.05 + 0.95 * rng.uniform01(), 10};
    const auto d = nucleus_distribution<float>(logits, sp);
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-9);
    for (int i = 0; i < 50; ++i) {
      const TokenId t = sample_token<float>(logits, sp, rng);
      ASSERT_GT(d[static_cast<std::size_t>(t)], 0.0);
    }
  }
}

TEST(Sampling, Validation) {
  EXPECT_NO_THROW(SamplingParams{}.validate());
  EXPECT_EQ(SamplingParams{}.temperature, 1.0);
  EXPECT_EQ(SamplingParams{}.top_p, 0.99);
  EXPECT_THROW((SamplingParams{0.0, 0.9, 10}.validate()), ConfigError);
  EXPECT_THROW((SamplingParams{NAN, 0.9, 10}.validate()), ConfigError);
  EXPECT_THROW((SamplingParams{1.0, 0.0, 10}.validate()), ConfigError);
  EXPECT_THROW((SamplingParams{1.0, 1.1, 10}.validate()), ConfigError);
  EXPECT_THROW((SamplingParams{1.0, 0.9, 0}.validate()), ConfigError);
}
