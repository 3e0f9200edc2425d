#include "cmplab/experiments.hpp"
#include "cmplab/errors.hpp"

#include <gtest/gtest.h>

namespace cmplab {
namespace {

ExperimentConfig small_config(std::uint64_t samples) {
  ExperimentConfig config;
  config.samples = samples;
  config.master_seed = 42;
  config.reward = std::vector<double>{0.2, 0.8};
  config.transport_samples = samples;
  return config;
}

TEST(ExperimentConfigTest, Validation) {
  auto config = small_config(0);
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = small_config(10);
  config.workers = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = small_config(10);
  config.reward = std::vector<double>{0.1, 0.2, 0.3};
  EXPECT_THROW(config.validate(), DimensionError);
  config = small_config(10);
  config.states = 21;
  config.reward.reset();
  EXPECT_THROW(config.validate(), EnumerationCapError);
}

TEST(ExperimentTest, SingleSampleIsDegenerateButValid) {
  const auto freq = run_partition_frequency(small_config(1));
  EXPECT_EQ(freq.samples, 1u);
  std::uint64_t total = 0;
  for (auto c : freq.counts) total += c;
  EXPECT_EQ(total, 1u);
  EXPECT_EQ(estimate_policy_entropy(freq).plug_in_entropy_bits, 0.0);
}

TEST(ExperimentTest, SampleStreamsDependOnlyOnIndex) {
  const auto config = small_config(10);
  EXPECT_EQ(sample_environment_for(config, 7), sample_environment_for(config, 7));
  EXPECT_NE(sample_environment_for(config, 7), sample_environment_for(config, 8));
  auto other = config;
  other.master_seed = 43;
  EXPECT_NE(sample_environment_for(config, 7), sample_environment_for(other, 7));
}

TEST(ExperimentTest, ResultsDoNotDependOnWorkerCount) {
  auto config = small_config(2000);
  config.states = 3;
  config.reward = std::vector<double>{0.1, 0.5, 0.9};
  config.transport_samples = 200;
  const auto r = resolve_reward(config);
  config.workers = 1;
  const auto serial = sweep_samples(config, r);
  const auto serial_transport = run_symmetry_transport(config, r, all_swap_pairs(3, 2));
  config.workers = 4;
  const auto parallel = sweep_samples(config, r);
  const auto parallel_transport = run_symmetry_transport(config, r, all_swap_pairs(3, 2));
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_EQ(serial[k].best, parallel[k].best);
    EXPECT_EQ(serial[k].effective_margin, parallel[k].effective_margin);
  }
  ASSERT_EQ(serial_transport.pairs.size(), parallel_transport.pairs.size());
  for (std::size_t p = 0; p < serial_transport.pairs.size(); ++p) {
    EXPECT_EQ(serial_transport.pairs[p].count_i_optimal, parallel_transport.pairs[p].count_i_optimal);
    EXPECT_EQ(serial_transport.pairs[p].volume_z, parallel_transport.pairs[p].volume_z);
  }
}

TEST(ExperimentTest, RandomRewardIsDrawnOncePerRunAndSpread) {
  auto config = small_config(10);
  config.states = 4;
  config.reward.reset();
  const auto a = resolve_reward(config);
  const auto b = resolve_reward(config);
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            std::vector<double>(b.values().begin(), b.values().end()));
  EXPECT_GE(a.max() - a.min(), 0.1);
}

TEST(SeparatingEnvironmentTest, ShapeAndInteriority) {
  const RewardFunction r({0.3, 0.9, 0.5});
  const auto env = construct_separating_environment(3, 2, Policy{{0, 1, 1}}, Policy{{1, 1, 0}}, r, 0.01);
  EXPECT_TRUE(validate_environment(env, 1e-12).ok());
  EXPECT_NEAR(min_entry(env), 0.005, 1e-15);
  // s_a = 0, s_b = 1
  EXPECT_NEAR(env(0, 0, 1), 0.99, 1e-15);
  EXPECT_NEAR(env(0, 1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(min_entry(construct_separating_environment(3, 2, Policy{{0, 1, 1}}, Policy{{1, 1, 0}}, r, 0.0)),
            0.0);
}

TEST(SeparatingEnvironmentTest, RejectsBadArguments) {
  const RewardFunction r({0.3, 0.9});
  EXPECT_THROW(construct_separating_environment(2, 2, Policy{{0, 1}}, Policy{{0, 1}}, r, 0.01),
               std::invalid_argument);
  EXPECT_THROW(construct_separating_environment(2, 2, Policy{{0, 1}}, Policy{{1, 1}}, r, 1.0),
               std::invalid_argument);
  EXPECT_THROW(construct_separating_environment(3, 2, Policy{{0, 1}}, Policy{{1, 1}}, r, 0.1),
               DimensionError);
}

TEST(SeparatingEnvironmentTest, FirstPolicyStrictlyWinsInEveryRegime) {
  const RewardFunction r({0.2, 0.7, 0.4});
  const auto policies = enumerate_policies(3, 2);
  for (const auto& pi_i : policies) {
    for (const auto& pi_j : policies) {
      if (pi_i == pi_j) continue;
      for (double eps : {0.0, 0.01, 0.1}) {
        const auto env = construct_separating_environment(3, 2, pi_i, pi_j, r, eps);
        std::vector<ValueSpec> specs{ValueSpec(Discounted{0.9}), ValueSpec(FiniteHorizon{5, 1.0})};
        if (eps > 0.0) specs.emplace_back(TimeAveraged{});
        for (const auto& spec : specs) {
          EXPECT_GT(policy_value(env, pi_i, spec, r), policy_value(env, pi_j, spec, r))
              << to_string(pi_i) << " vs " << to_string(pi_j) << " eps=" << eps;
        }
      }
    }
  }
}

TEST(TieReportTest, ExactTiesAreFlagged) {
  const std::vector<double> margins{0.5, 0.0, 2e-3, 5e-10, 0.05};
  const auto report = summarize_margins(margins, {1e-1, 1e-9, 1e-2, 1e-3}, 1e-9);
  EXPECT_EQ(report.thresholds, (std::vector<double>{1e-9, 1e-3, 1e-2, 1e-1}));
  EXPECT_EQ(report.tie_counts, (std::vector<std::uint64_t>{2, 2, 3, 4}));
  EXPECT_EQ(report.flagged_samples, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(report.margin_quantiles.min, 0.0);
  EXPECT_EQ(report.margin_quantiles.max, 0.5);
}

TEST(TieReportTest, CountsAreMonotoneInThreshold) {
  auto config = small_config(3000);
  const auto report = run_tie_rate(config, {1e-9, 1e-4, 1e-3, 1e-2, 1e-1, 1.0});
  for (std::size_t t = 1; t < report.tie_counts.size(); ++t) {
    EXPECT_LE(report.tie_counts[t - 1], report.tie_counts[t]);
  }
  EXPECT_EQ(report.tie_counts.front(), 0u);
  EXPECT_EQ(report.tie_counts.back(), 3000u);
}

TEST(TransportExperimentTest, IdenticalPairIsVacuous) {
  const auto config = small_config(200);
  const auto report = run_symmetry_transport(config, SwapPair(Policy{{1, 0}}, Policy{{1, 0}}));
  ASSERT_EQ(report.pairs.size(), 1u);
  EXPECT_EQ(report.total_violations(), 0u);
  EXPECT_EQ(report.pairs[0].count_i_optimal, report.pairs[0].count_j_optimal);
  EXPECT_EQ(report.pairs[0].volume_z, 0.0);
}

TEST(TransportExperimentTest, NoViolationsAcrossAllPairs) {
  const auto config = small_config(300);
  const auto r = resolve_reward(config);
  const auto pairs = all_swap_pairs(2, 2);
  EXPECT_EQ(pairs.size(), 6u);
  const auto report = run_symmetry_transport(config, r, pairs);
  EXPECT_EQ(report.total_violations(), 0u);
  for (const auto& p : report.pairs) EXPECT_EQ(p.samples, 300u);
}

TEST(FullReportTest, SmallRunProducesConsistentSections) {
  auto config = small_config(4000);
  config.transport_samples = 500;
  const auto report = run_full_report(config);
  EXPECT_EQ(report.frequency.samples, 4000u);
  EXPECT_EQ(report.ties.samples, 4000u);
  EXPECT_EQ(report.transport.samples, 500u);
  EXPECT_EQ(report.transport.pairs.size(), 6u);
  EXPECT_FALSE(report.acceptance.empty());
  EXPECT_FALSE(report.seed_derivation.empty());
  bool passed = true;
  for (const auto& check : report.acceptance) passed = passed && check.passed;
  EXPECT_EQ(passed, report.passed());
}

}  // namespace
}  // namespace cmplab
