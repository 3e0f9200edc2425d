#include "cmplab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "cmplab/errors.hpp"
#include "cmplab/policy.hpp"

namespace cmplab {

FrequencyReport make_frequency_report(std::size_t states, std::size_t actions,
                                      std::vector<std::uint64_t> counts) {
  const auto cells = policy_count(states, actions, std::numeric_limits<std::uint64_t>::max());
  if (counts.size() != cells) {
    throw DimensionError("frequency report needs m^n = " + std::to_string(cells) +
                         " counts, got " + std::to_string(counts.size()));
  }
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("frequency report needs at least one sample");

  FrequencyReport report;
  report.states = states;
  report.actions = actions;
  report.samples = total;
  report.degrees_of_freedom = cells - 1;
  report.frequencies.resize(cells);
  const double expected = static_cast<double>(total) / static_cast<double>(cells);
  const double uniform = 1.0 / static_cast<double>(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double c = static_cast<double>(counts[k]);
    report.frequencies[k] = c / static_cast<double>(total);
    report.chi_square += (c - expected) * (c - expected) / expected;
    report.max_abs_deviation =
        std::max(report.max_abs_deviation, std::abs(report.frequencies[k] - uniform));
  }
  report.counts = std::move(counts);
  return report;
}

double plug_in_entropy_bits(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double f = static_cast<double>(c) / static_cast<double>(total);
    h -= f * std::log2(f);
  }
  return std::max(h, 0.0);
}

EntropyReport estimate_policy_entropy(const FrequencyReport& freq) {
  EntropyReport report;
  report.samples = freq.samples;
  report.target_bits = static_cast<double>(freq.states) * std::log2(static_cast<double>(freq.actions));
  report.plug_in_entropy_bits = plug_in_entropy_bits(freq.counts);
  report.support_size = static_cast<std::size_t>(
      std::count_if(freq.counts.begin(), freq.counts.end(), [](auto c) { return c > 0; }));

  const double n = static_cast<double>(freq.samples);
  report.miller_madow_entropy_bits =
      report.plug_in_entropy_bits +
      static_cast<double>(report.support_size - 1) / (2.0 * n * std::log(2.0));

  double second_moment = 0.0;
  for (double f : freq.frequencies) {
    if (f > 0.0) second_moment += f * std::log2(f) * std::log2(f);
  }
  const double h = report.plug_in_entropy_bits;
  report.standard_error = std::sqrt(std::max(second_moment - h * h, 0.0) / n);

  if (freq.samples < freq.counts.size()) {
    report.warnings.push_back("undersampled: N = " + std::to_string(freq.samples) +
                              " is below the number of policies " +
                              std::to_string(freq.counts.size()));
  }
  return report;
}

double chi_square_quantile(std::uint64_t degrees_of_freedom, double probability) {
  if (degrees_of_freedom == 0) throw std::invalid_argument("chi-square needs df >= 1");
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(degrees_of_freedom));
  return boost::math::quantile(dist, probability);
}

double two_sided_normal_critical(double alpha, std::size_t comparisons) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (comparisons == 0) throw std::invalid_argument("need at least one comparison");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(
      standard, alpha / (2.0 * static_cast<double>(comparisons))));
}

}  // namespace cmplab
