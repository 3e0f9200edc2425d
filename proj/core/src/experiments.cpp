#include "cmplab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmplab/errors.hpp"
#include "cmplab/random.hpp"

namespace cmplab {

namespace {

/// Runs fn(worker, first, last) on contiguous index blocks. Exceptions are
/// rethrown on the calling thread, lowest worker first.
template <class Fn>
void parallel_blocks(std::uint64_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (workers == 1) {
    fn(std::size_t{0}, std::uint64_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::uint64_t block = count / workers;
  const std::uint64_t extra = count % workers;
  std::uint64_t first = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::uint64_t last = first + block + (w < extra ? 1 : 0);
    threads.emplace_back([&, w, first, last] {
      try {
        fn(w, first, last);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    first = last;
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto pos = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[pos];
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (states < 2 || actions < 2) throw std::invalid_argument("experiment needs n >= 2 and m >= 2");
  if (samples < 1) throw std::invalid_argument("experiment needs at least one sample (N >= 1)");
  if (workers < 1) throw std::invalid_argument("experiment needs at least one worker");
  if (!(tie_tolerance >= 0.0)) throw std::invalid_argument("tie tolerance must be >= 0");
  spec.check_states(states);
  policy_count(states, actions, enumeration_cap);
  if (reward) RewardFunction check(*reward);
  if (reward && reward->size() != states) throw DimensionError("reward length must equal n");
  for (double t : tie_thresholds) {
    if (!(t > 0.0)) throw std::invalid_argument("tie thresholds must be positive");
  }
}

Environment sample_environment_for(const ExperimentConfig& config, std::uint64_t sample_index) {
  auto rng = make_stream(config.master_seed, StreamTag::environment_sample, sample_index);
  return sample_uniform_environment(config.states, config.actions, rng);
}

RewardFunction resolve_reward(const ExperimentConfig& config) {
  if (config.reward) return RewardFunction(*config.reward);
  auto rng = make_stream(config.master_seed, StreamTag::reward, 0);
  std::vector<double> r(config.states);
  for (;;) {
    std::generate(r.begin(), r.end(), [&] { return uniform_open01(rng); });
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    if (*hi - *lo >= 0.1) return RewardFunction(r);
  }
}

std::vector<SampleOutcome> sweep_samples(const ExperimentConfig& config, const RewardFunction& r) {
  config.validate();
  std::vector<SampleOutcome> outcomes(config.samples);
  parallel_blocks(config.samples, config.workers,
                  [&](std::size_t, std::uint64_t first, std::uint64_t last) {
                    for (auto k = first; k < last; ++k) {
                      const auto env = sample_environment_for(config, k);
                      const auto table = value_table(env, config.spec, r, config.enumeration_cap);
                      const auto result = summarize_value_table(table, config.tie_tolerance);
                      outcomes[k] = {result.best.value,
                                     result.tied() ? 0.0 : result.runner_up_margin,
                                     result.tied()};
                    }
                  });
  return outcomes;
}

FrequencyReport frequency_from_outcomes(const ExperimentConfig& config,
                                        std::span<const SampleOutcome> outcomes) {
  std::vector<std::uint64_t> counts(policy_count(config.states, config.actions, config.enumeration_cap), 0);
  for (const auto& o : outcomes) ++counts[o.best];
  return make_frequency_report(config.states, config.actions, std::move(counts));
}

FrequencyReport run_partition_frequency(const ExperimentConfig& config) {
  const auto r = resolve_reward(config);
  return frequency_from_outcomes(config, sweep_samples(config, r));
}

TieReport summarize_margins(std::span<const double> margins, std::vector<double> thresholds,
                            double tie_tolerance) {
  TieReport report;
  report.tie_tolerance = tie_tolerance;
  report.samples = margins.size();
  std::sort(thresholds.begin(), thresholds.end());
  report.thresholds = thresholds;
  report.tie_counts.assign(thresholds.size(), 0);
  for (std::size_t k = 0; k < margins.size(); ++k) {
    const double margin = margins[k];
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (margin < thresholds[t]) ++report.tie_counts[t];
    }
    if (margin <= 0.0 || margin < tie_tolerance) report.flagged_samples.push_back(k);
  }
  std::vector<double> sorted(margins.begin(), margins.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    report.margin_quantiles = {sorted.front(),
                               quantile_sorted(sorted, 0.01),
                               quantile_sorted(sorted, 0.05),
                               quantile_sorted(sorted, 0.25),
                               quantile_sorted(sorted, 0.5),
                               sorted.back()};
  }
  return report;
}

TieReport tie_report_from_outcomes(const ExperimentConfig& config,
                                   std::span<const SampleOutcome> outcomes) {
  std::vector<double> margins;
  margins.reserve(outcomes.size());
  for (const auto& o : outcomes) margins.push_back(o.effective_margin);
  return summarize_margins(margins, config.tie_thresholds, config.tie_tolerance);
}

TieReport run_tie_rate(const ExperimentConfig& config, std::vector<double> thresholds) {
  auto with_thresholds = config;
  with_thresholds.tie_thresholds = std::move(thresholds);
  const auto r = resolve_reward(with_thresholds);
  return tie_report_from_outcomes(with_thresholds, sweep_samples(with_thresholds, r));
}

std::uint64_t TransportReport::total_violations() const noexcept {
  std::uint64_t total = 0;
  for (const auto& p : pairs) total += p.violations();
  return total;
}

std::vector<SwapPair> all_swap_pairs(std::size_t states, std::size_t actions) {
  const auto policies = enumerate_policies(states, actions);
  std::vector<SwapPair> pairs;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    for (std::size_t j = i + 1; j < policies.size(); ++j) {
      pairs.emplace_back(policies[i], policies[j]);
    }
  }
  return pairs;
}

TransportReport run_symmetry_transport(const ExperimentConfig& config, const RewardFunction& r,
                                       std::span<const SwapPair> pairs) {
  config.validate();
  const auto policies = enumerate_policies(config.states, config.actions, config.enumeration_cap);
  const std::uint64_t samples = std::min(config.transport_samples, config.samples);

  std::vector<PolicyIndex> pair_i;
  std::vector<PolicyIndex> pair_j;
  for (const auto& pair : pairs) {
    pair_i.push_back(index_from_policy(pair.pi_i, config.actions));
    pair_j.push_back(index_from_policy(pair.pi_j, config.actions));
  }
  // phi_pair[p][k] = index of swap_policy(policy k, pair p)
  std::vector<std::vector<std::uint64_t>> phi(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto& rho : policies) {
      phi[p].push_back(index_from_policy(swap_policy(rho, pairs[p]), config.actions).value);
    }
  }

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::uint64_t>(config.workers, std::max<std::uint64_t>(samples, 1)));
  std::vector<std::vector<PairTransport>> partial(workers, std::vector<PairTransport>(pairs.size()));

  parallel_blocks(samples, workers, [&](std::size_t w, std::uint64_t first, std::uint64_t last) {
    auto& acc = partial[w];
    for (auto k = first; k < last; ++k) {
      const auto env = sample_environment_for(config, k);
      const auto table_x = value_table(env, config.spec, r, config.enumeration_cap);
      const auto result_x = summarize_value_table(table_x, config.tie_tolerance);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& pair = pairs[p];
        auto& out = acc[p];
        ++out.samples;
        const auto swapped = swap_environment(env, pair);

        bool involution_ok = swap_environment(swapped, pair) == env;
        for (std::size_t k2 = 0; k2 < policies.size(); ++k2) {
          if (phi[p][phi[p][k2]] != k2) involution_ok = false;
        }
        if (!involution_ok) ++out.involution_violations;

        for (const auto& rho : policies) {
          if (!verify_matrix_transport(env, pair, rho)) ++out.matrix_violations;
        }

        const auto table_g = value_table(swapped, config.spec, r, config.enumeration_cap);
        for (std::size_t k2 = 0; k2 < policies.size(); ++k2) {
          // value of rho in g(x) must equal value of phi(rho) in x, bit for bit
          if (!(table_g[k2].value == table_x[phi[p][k2]].value)) ++out.value_violations;
        }

        if (!result_x.tied()) {
          ++out.optimality_checked;
          const auto result_g = summarize_value_table(table_g, config.tie_tolerance);
          if (result_g.best.value != phi[p][result_x.best.value]) ++out.optimality_violations;
          if (result_x.best == pair_i[p]) ++out.count_i_optimal;
          if (result_x.best == pair_j[p]) ++out.count_j_optimal;
        }
      }
    }
  });

  TransportReport report;
  report.samples = samples;
  report.pairs.resize(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto& out = report.pairs[p];
    out.pi_i = pair_i[p];
    out.pi_j = pair_j[p];
    for (const auto& worker : partial) {
      const auto& part = worker[p];
      out.samples += part.samples;
      out.matrix_violations += part.matrix_violations;
      out.value_violations += part.value_violations;
      out.involution_violations += part.involution_violations;
      out.optimality_checked += part.optimality_checked;
      out.optimality_violations += part.optimality_violations;
      out.count_i_optimal += part.count_i_optimal;
      out.count_j_optimal += part.count_j_optimal;
    }
    const double total = static_cast<double>(out.count_i_optimal + out.count_j_optimal);
    out.volume_z = total > 0.0 ? (static_cast<double>(out.count_i_optimal) -
                                  static_cast<double>(out.count_j_optimal)) / std::sqrt(total)
                               : 0.0;
  }
  return report;
}

TransportReport run_symmetry_transport(const ExperimentConfig& config, const SwapPair& pair) {
  const auto r = resolve_reward(config);
  return run_symmetry_transport(config, r, std::span<const SwapPair>(&pair, 1));
}

PairTransport check_pair_transport(const ExperimentConfig& config, const RewardFunction& r,
                                   const SwapPair& pair) {
  return run_symmetry_transport(config, r, std::span<const SwapPair>(&pair, 1)).pairs.front();
}

Environment construct_separating_environment(std::size_t states, std::size_t actions,
                                             const Policy& pi_i, const Policy& pi_j,
                                             const RewardFunction& r, double epsilon) {
  if (pi_i.states() != states || pi_j.states() != states || r.size() != states) {
    throw DimensionError("separating construction: policies and reward must cover n states");
  }
  for (std::size_t s = 0; s < states; ++s) {
    if (pi_i[s] >= actions || pi_j[s] >= actions) {
      throw DimensionError("separating construction: action out of range");
    }
  }
  if (pi_i == pi_j) {
    throw std::invalid_argument("separating construction needs two different policies");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("separating construction needs 0 <= epsilon < 1");
  }
  std::size_t s_a = 0;
  while (pi_i[s_a] == pi_j[s_a]) ++s_a;
  const std::size_t s_b = r.argmax();

  const double uniform = 1.0 / static_cast<double>(states);
  std::vector<double> p(states * actions * states, uniform);
  const double leak = epsilon / static_cast<double>(states - 1);
  const auto offset = (s_a * actions + pi_i[s_a]) * states;
  for (std::size_t next = 0; next < states; ++next) {
    p[offset + next] = next == s_b ? 1.0 - epsilon : leak;
  }
  return Environment(states, actions, std::move(p));
}

bool ExperimentReport::passed() const noexcept {
  return std::all_of(acceptance.begin(), acceptance.end(),
                     [](const AcceptanceCheck& c) { return c.passed; });
}

std::vector<AcceptanceCheck> evaluate_acceptance(const ExperimentReport& report) {
  const auto& a = report.config.acceptance;
  const auto& freq = report.frequency;
  std::vector<AcceptanceCheck> checks;
  const double cells = static_cast<double>(freq.counts.size());
  const double p = 1.0 / cells;
  const double n = static_cast<double>(freq.samples);

  if (a.frequency_sigmas) {
    const double band = *a.frequency_sigmas * std::sqrt(p * (1.0 - p) / n);
    checks.push_back({"frequency_band", freq.max_abs_deviation <= band,
                      "max_abs_deviation=" + format_double(freq.max_abs_deviation) +
                          " band=" + format_double(band)});
  }
  if (a.chi_square_quantile) {
    const double critical = chi_square_quantile(freq.degrees_of_freedom, *a.chi_square_quantile);
    checks.push_back({"chi_square", freq.chi_square < critical,
                      "chi_square=" + format_double(freq.chi_square) +
                          " critical=" + format_double(critical) +
                          " df=" + std::to_string(freq.degrees_of_freedom)});
  }
  if (a.entropy_tolerance_bits) {
    const double err = std::abs(report.entropy.miller_madow_entropy_bits - report.entropy.target_bits);
    checks.push_back({"entropy_target", err <= *a.entropy_tolerance_bits,
                      "miller_madow=" + format_double(report.entropy.miller_madow_entropy_bits) +
                          " target=" + format_double(report.entropy.target_bits) +
                          " tolerance=" + format_double(*a.entropy_tolerance_bits)});
  }
  {
    const double bound = std::log2(cells) + 1e-12;
    checks.push_back({"entropy_bound", report.entropy.plug_in_entropy_bits <= bound,
                      "plug_in=" + format_double(report.entropy.plug_in_entropy_bits) +
                          " log2_policies=" + format_double(std::log2(cells))});
  }
  if (a.max_ties) {
    const auto ties = static_cast<std::uint64_t>(report.ties.flagged_samples.size());
    checks.push_back({"ties", ties <= *a.max_ties,
                      "ties=" + std::to_string(ties) + " max=" + std::to_string(*a.max_ties)});
  }
  if (a.require_increasing_tie_counts) {
    bool increasing = true;
    std::optional<std::uint64_t> previous;
    for (std::size_t t = 0; t < report.ties.thresholds.size(); ++t) {
      if (report.ties.thresholds[t] <= report.ties.tie_tolerance) continue;
      if (previous && report.ties.tie_counts[t] <= *previous) increasing = false;
      previous = report.ties.tie_counts[t];
    }
    checks.push_back({"tie_counts_increasing", increasing, ""});
  }
  if (a.max_transport_violations) {
    const auto v = report.transport.total_violations();
    checks.push_back({"transport", v <= *a.max_transport_violations,
                      "violations=" + std::to_string(v)});
  }
  if (a.volume_alpha && !report.transport.pairs.empty()) {
    double worst = 0.0;
    for (const auto& pair : report.transport.pairs) worst = std::max(worst, std::abs(pair.volume_z));
    const double critical = two_sided_normal_critical(*a.volume_alpha, report.transport.pairs.size());
    checks.push_back({"volume_symmetry", worst <= critical,
                      "max_abs_z=" + format_double(worst) + " critical=" + format_double(critical) +
                          " pairs=" + std::to_string(report.transport.pairs.size())});
  }
  return checks;
}

ExperimentReport run_full_report(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  ExperimentReport report;
  report.config = config;
  const auto r = resolve_reward(config);
  report.reward.assign(r.values().begin(), r.values().end());

  const auto outcomes = sweep_samples(config, r);
  report.frequency = frequency_from_outcomes(config, outcomes);
  report.entropy = estimate_policy_entropy(report.frequency);
  report.ties = tie_report_from_outcomes(config, outcomes);
  const auto pairs = all_swap_pairs(config.states, config.actions);
  report.transport = run_symmetry_transport(config, r, pairs);
  report.seed_derivation =
      "sample k: mt19937_64(derive_seed(master_seed, 1, k)); reward: "
      "mt19937_64(derive_seed(master_seed, 2, 0)); derive_seed(s, t, k) = "
      "mix64(mix64(s ^ mix64(t)) + k) with mix64 the SplitMix64 finalizer";
  report.acceptance = evaluate_acceptance(report);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cmplab
