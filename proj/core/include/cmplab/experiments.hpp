#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmplab/entropy.hpp"
#include "cmplab/environment.hpp"
#include "cmplab/optimality.hpp"
#include "cmplab/policy.hpp"
#include "cmplab/symmetry.hpp"
#include "cmplab/value.hpp"

namespace cmplab {

/// Pass/fail thresholds evaluated on a finished report. An empty optional
/// disables that check.
struct AcceptanceThresholds {
  /// Every frequency within this many binomial sigmas of 1/m^n.
  std::optional<double> frequency_sigmas = 3.0;
  /// Chi-square statistic below this quantile of chi^2_{m^n - 1}.
  std::optional<double> chi_square_quantile = 0.999;
  /// |Miller-Madow entropy - n log2 m| within this many bits.
  std::optional<double> entropy_tolerance_bits = 0.01;
  /// Samples whose effective margin falls below the tie tolerance.
  std::optional<std::uint64_t> max_ties = 0;
  /// Tie counts strictly increase across thresholds above the tie tolerance.
  bool require_increasing_tie_counts = true;
  std::optional<std::uint64_t> max_transport_violations = 0;
  /// Family-wise significance for |count_i - count_j| / sqrt(count_i + count_j)
  /// over all swap pairs (Bonferroni-corrected two-sided normal bound).
  std::optional<double> volume_alpha = 0.001;
};

struct ExperimentConfig {
  std::size_t states = 2;
  std::size_t actions = 2;
  ValueSpec spec{TimeAveraged{}};
  /// Fixed reward; when empty a reward is drawn once per run from the master seed.
  std::optional<std::vector<double>> reward;
  std::uint64_t samples = 100'000;
  std::uint64_t master_seed = 0;
  double tie_tolerance = kDefaultTieTolerance;
  std::size_t workers = 1;
  std::vector<double> tie_thresholds{1e-9, 1e-3, 1e-2, 1e-1};
  /// Samples used by the symmetry-transport experiment (capped at samples).
  std::uint64_t transport_samples = 10'000;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  AcceptanceThresholds acceptance;

  /// Throws std::invalid_argument / EnumerationCapError on bad settings.
  void validate() const;
};

/// Environment used by sample k of a run; independent of worker count.
Environment sample_environment_for(const ExperimentConfig& config, std::uint64_t sample_index);

/// Fixed reward from the config or the per-run draw: Uniform(0,1)^n, redrawn
/// until max - min >= 0.1.
RewardFunction resolve_reward(const ExperimentConfig& config);

/// Per-sample outcome of the exhaustive search.
struct SampleOutcome {
  std::uint64_t best = 0;
  /// 0 when the tie set has more than one member, else the runner-up margin.
  double effective_margin = 0.0;
  bool tied = false;
};

/// Exhaustive search on every sample, split across config.workers threads.
/// Element k always describes sample k.
std::vector<SampleOutcome> sweep_samples(const ExperimentConfig& config, const RewardFunction& r);

FrequencyReport frequency_from_outcomes(const ExperimentConfig& config,
                                        std::span<const SampleOutcome> outcomes);

FrequencyReport run_partition_frequency(const ExperimentConfig& config);

struct MarginQuantiles {
  double min = 0.0;
  double p01 = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct TieReport {
  double tie_tolerance = kDefaultTieTolerance;
  /// Ascending.
  std::vector<double> thresholds;
  /// tie_counts[k] = #samples with effective margin < thresholds[k].
  std::vector<std::uint64_t> tie_counts;
  MarginQuantiles margin_quantiles;
  /// Samples that tied or fell below the tie tolerance, by sample index.
  std::vector<std::uint64_t> flagged_samples;
  std::uint64_t samples = 0;
};

/// Tie statistics from a list of effective margins (index = sample index).
TieReport summarize_margins(std::span<const double> margins, std::vector<double> thresholds,
                            double tie_tolerance);
TieReport tie_report_from_outcomes(const ExperimentConfig& config,
                                   std::span<const SampleOutcome> outcomes);

TieReport run_tie_rate(const ExperimentConfig& config, std::vector<double> thresholds);

struct PairTransport {
  PolicyIndex pi_i;
  PolicyIndex pi_j;
  std::uint64_t samples = 0;
  std::uint64_t matrix_violations = 0;
  std::uint64_t value_violations = 0;
  std::uint64_t involution_violations = 0;
  /// Samples with a unique optimum, where optimality transport was checked.
  std::uint64_t optimality_checked = 0;
  std::uint64_t optimality_violations = 0;
  std::uint64_t count_i_optimal = 0;
  std::uint64_t count_j_optimal = 0;
  /// (count_i - count_j) / sqrt(count_i + count_j); 0 when both counts are 0.
  double volume_z = 0.0;

  std::uint64_t violations() const noexcept {
    return matrix_violations + value_violations + involution_violations + optimality_violations;
  }
};

struct TransportReport {
  std::uint64_t samples = 0;
  std::vector<PairTransport> pairs;

  std::uint64_t total_violations() const noexcept;
};

/**
 * Checks, per sample and per pair: bitwise matrix transport for every policy,
 * bitwise value transport, involution of both maps, and (when the sample has
 * a unique optimum) that the swapped environment's optimum is phi(best).
 */
PairTransport check_pair_transport(const ExperimentConfig& config, const RewardFunction& r,
                                   const SwapPair& pair);
TransportReport run_symmetry_transport(const ExperimentConfig& config, const RewardFunction& r,
                                       std::span<const SwapPair> pairs);
TransportReport run_symmetry_transport(const ExperimentConfig& config, const SwapPair& pair);
/// Every unordered pair of distinct policies.
std::vector<SwapPair> all_swap_pairs(std::size_t states, std::size_t actions);

/**
 * Environment on which pi_i strictly beats pi_j. Every row is uniform except
 * (s_a, pi_i(s_a), .), which sends 1 - eps to s_b and eps / (n - 1) to every
 * other state. s_a is the lowest state where the policies disagree and s_b the
 * lowest-index highest-reward state. eps = 0 puts the environment on the
 * boundary; eps > 0 keeps it interior.
 */
Environment construct_separating_environment(std::size_t states, std::size_t actions,
                                             const Policy& pi_i, const Policy& pi_j,
                                             const RewardFunction& r, double epsilon);

struct AcceptanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> reward;
  FrequencyReport frequency;
  EntropyReport entropy;
  TieReport ties;
  TransportReport transport;
  std::vector<AcceptanceCheck> acceptance;
  /// How per-sample streams are derived from the master seed.
  std::string seed_derivation;
  /// Not serialized with the report (it would break byte-identical reruns);
  /// recorded in the run manifest instead.
  double wall_clock_seconds = 0.0;

  bool passed() const noexcept;
};

std::vector<AcceptanceCheck> evaluate_acceptance(const ExperimentReport& report);

/// Frequency, entropy, tie and transport experiments under one master seed.
ExperimentReport run_full_report(const ExperimentConfig& config);

}  // namespace cmplab
