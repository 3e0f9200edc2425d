#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cmplab {

/// How often each policy came out optimal across N sampled environments.
struct FrequencyReport {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  /// Pearson statistic against the uniform null 1/m^n.
  double chi_square = 0.0;
  std::uint64_t degrees_of_freedom = 0;
  double max_abs_deviation = 0.0;
};

/// Builds frequencies and the uniform-null chi-square from per-policy counts.
/// counts.size() must equal m^n and the counts must not all be zero.
FrequencyReport make_frequency_report(std::size_t states, std::size_t actions,
                                      std::vector<std::uint64_t> counts);

struct EntropyReport {
  double plug_in_entropy_bits = 0.0;
  double miller_madow_entropy_bits = 0.0;
  /// n log2 m
  double target_bits = 0.0;
  /// Delta-method standard error of the plug-in estimate.
  double standard_error = 0.0;
  std::size_t support_size = 0;
  std::uint64_t samples = 0;
  std::vector<std::string> warnings;
};

/// Plug-in entropy -sum f log2 f over nonzero cells, plus the Miller-Madow
/// correction (K - 1) / (2 N ln 2) with K the observed support size.
EntropyReport estimate_policy_entropy(const FrequencyReport& freq);

double plug_in_entropy_bits(std::span<const std::uint64_t> counts);

/// Upper quantile of the chi-square distribution, e.g. (3, 0.999) -> 16.27.
double chi_square_quantile(std::uint64_t degrees_of_freedom, double probability);

/// z such that |Z| > z for any of `comparisons` standard normals has
/// probability at most alpha (Bonferroni), e.g. (0.001, 6) -> 3.76.
double two_sided_normal_critical(double alpha, std::size_t comparisons);

}  // namespace cmplab
