#include "cmplab/entropy.hpp"
#include "cmplab/random.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace cmplab {
namespace {

TEST(EntropyTest, UniformCountsGiveLogOfSupport) {
  const std::vector<std::uint64_t> counts{25, 25, 25, 25};
  EXPECT_NEAR(plug_in_entropy_bits(counts), 2.0, 1e-15);
}

TEST(EntropyTest, SingleCellHasZeroEntropy) {
  const std::vector<std::uint64_t> counts{0, 40, 0, 0};
  EXPECT_EQ(plug_in_entropy_bits(counts), 0.0);
}

TEST(EntropyTest, MillerMadowCorrection) {
  const auto freq = make_frequency_report(2, 2, {10, 20, 30, 0});
  const auto report = estimate_policy_entropy(freq);
  EXPECT_EQ(report.support_size, 3u);
  EXPECT_EQ(report.samples, 60u);
  EXPECT_NEAR(report.miller_madow_entropy_bits - report.plug_in_entropy_bits,
              2.0 / (2.0 * 60.0 * std::log(2.0)), 1e-15);
  EXPECT_DOUBLE_EQ(report.target_bits, 2.0);
  EXPECT_TRUE(report.warnings.empty());
}

TEST(EntropyTest, ExactUniformCountsHitTarget) {
  for (auto [n, m] : {std::pair{2u, 2u}, {3u, 2u}, {2u, 3u}, {4u, 3u}}) {
    const std::size_t cells = static_cast<std::size_t>(std::pow(m, n));
    const auto freq = make_frequency_report(n, m, std::vector<std::uint64_t>(cells, 7));
    const auto report = estimate_policy_entropy(freq);
    EXPECT_NEAR(report.plug_in_entropy_bits, n * std::log2(m), 1e-12);
    EXPECT_LE(report.plug_in_entropy_bits, report.target_bits + 1e-12);
    EXPECT_EQ(freq.chi_square, 0.0);
  }
}

TEST(EntropyTest, UndersampledRunIsFlagged) {
  const auto report = estimate_policy_entropy(make_frequency_report(3, 2, {1, 0, 2, 0, 0, 0, 0, 1}));
  EXPECT_FALSE(report.warnings.empty());
}

TEST(EntropyTest, PlugInNeverExceedsLogSupport) {
  std::uint64_t state = 1;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> counts(9);
    for (auto& c : counts) c = (state = mix64(state)) % 50;
    counts[0] += 1;
    EXPECT_LE(plug_in_entropy_bits(counts), std::log2(9.0) + 1e-12);
  }
}

TEST(FrequencyTest, ChiSquareAgainstUniformNull) {
  const auto freq = make_frequency_report(2, 2, {30, 20, 25, 25});
  EXPECT_EQ(freq.degrees_of_freedom, 3u);
  EXPECT_NEAR(freq.chi_square, (25.0 + 25.0) / 25.0, 1e-15);
  EXPECT_NEAR(freq.max_abs_deviation, 0.05, 1e-15);
  EXPECT_DOUBLE_EQ(freq.frequencies[0], 0.3);
  EXPECT_THROW(make_frequency_report(2, 2, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(make_frequency_report(2, 2, {0, 0, 0, 0}), std::invalid_argument);
}

TEST(FrequencyTest, ChiSquareQuantiles) {
  EXPECT_NEAR(chi_square_quantile(3, 0.999), 16.266, 1e-3);
  EXPECT_NEAR(chi_square_quantile(7, 0.999), 24.322, 1e-3);
  EXPECT_NEAR(chi_square_quantile(1, 0.95), 3.841, 1e-3);
}

TEST(FrequencyTest, BonferroniNormalCritical) {
  EXPECT_NEAR(two_sided_normal_critical(0.05, 1), 1.95996, 1e-5);
  EXPECT_NEAR(two_sided_normal_critical(0.001, 6), 3.7648, 1e-3);
  EXPECT_GT(two_sided_normal_critical(0.001, 28), two_sided_normal_critical(0.001, 6));
}

}  // namespace
}  // namespace cmplab
