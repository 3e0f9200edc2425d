// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cmplab/experiments.hpp"
#include "cmplab/report_io.hpp"

namespace {

using namespace cmplab;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Run {
  std::string label;
  ExperimentConfig config;
  std::vector<SampleOutcome> outcomes;
  FrequencyReport frequency;
};

// Sweeps are shared between criteria: each (n, m, regime) run is done once.
class RunCache {
 public:
  const Run& get(const std::string& label, std::size_t n, std::size_t m, const ValueSpec& spec,
                 std::vector<double> reward, std::uint64_t seed) {
    for (const auto& run : runs_) {
      if (run.label == label) return run;
    }
    Run run;
    run.label = label;
    run.config.states = n;
    run.config.actions = m;
    run.config.spec = spec;
    run.config.reward = std::move(reward);
    run.config.samples = 100'000;
    run.config.master_seed = seed;
    const auto r = resolve_reward(run.config);
    run.outcomes = sweep_samples(run.config, r);
    run.frequency = frequency_from_outcomes(run.config, run.outcomes);
    runs_.push_back(std::move(run));
    return runs_.back();
  }
  const std::deque<Run>& all() const { return runs_; }

 private:
  // deque: references handed out by get() survive later insertions
  std::deque<Run> runs_;
};

RunCache cache;

const Run& run_n2m2(int regime) {
  switch (regime) {
    case 0:
      return cache.get("n2m2-discounted", 2, 2, ValueSpec(Discounted{0.9}), {0.2, 0.8}, 1001);
    case 1:
      return cache.get("n2m2-finite", 2, 2,
                       ValueSpec(FiniteHorizon{5, 1.0}, StateDistribution::uniform(2)), {0.2, 0.8},
                       1002);
    default:
      return cache.get("n2m2-averaged", 2, 2, ValueSpec(TimeAveraged{}), {0.2, 0.8}, 1003);
  }
}

const Run& run_n3m2() {
  return cache.get("n3m2-averaged", 3, 2, ValueSpec(TimeAveraged{}), {0.2, 0.5, 0.8}, 1004);
}

const Run& run_n2m3() {
  return cache.get("n2m3-averaged", 2, 3, ValueSpec(TimeAveraged{}), {0.2, 0.8}, 1005);
}

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

Outcome equal_volume_partition() {
  Outcome out;
  const double band = 0.0041;
  const double chi_limit = 16.3;
  std::ostringstream detail;
  for (int regime = 0; regime < 3; ++regime) {
    const auto& run = run_n2m2(regime);
    double worst = 0.0;
    for (double f : run.frequency.frequencies) worst = std::max(worst, std::abs(f - 0.25));
    const bool ok = worst <= band && run.frequency.chi_square < chi_limit;
    out.passed = out.passed && ok;
    detail << run.label << ": max|f-0.25|=" << fmt(worst, 3) << " chi2=" << fmt(run.frequency.chi_square, 4)
           << (ok ? "" : " (out of band)") << "; ";
  }
  out.detail = detail.str();
  return out;
}

Outcome entropy_matches_n_log_m() {
  Outcome out;
  std::ostringstream detail;
  const std::vector<std::pair<const Run*, double>> cases{
      {&run_n2m2(2), 2.0}, {&run_n3m2(), 3.0}, {&run_n2m3(), 2.0 * std::log2(3.0)}};
  for (const auto& [run, target] : cases) {
    const auto e = estimate_policy_entropy(run->frequency);
    const bool ok = std::abs(e.miller_madow_entropy_bits - target) <= 0.01;
    out.passed = out.passed && ok;
    detail << run->label << ": " << fmt(e.miller_madow_entropy_bits, 6) << " vs " << fmt(target, 6)
           << "; ";
  }
  out.detail = detail.str();
  return out;
}

Outcome entropy_upper_bound() {
  Outcome out;
  double worst_gap = -INFINITY;
  for (const auto& run : cache.all()) {
    const auto e = estimate_policy_entropy(run.frequency);
    const double bound = std::log2(static_cast<double>(run.frequency.counts.size()));
    worst_gap = std::max(worst_gap, e.plug_in_entropy_bits - bound);
    if (e.plug_in_entropy_bits > bound + 1e-12) out.passed = false;
  }
  out.detail = std::to_string(cache.all().size()) + " runs, max(H - log2 m^n)=" + fmt(worst_gap, 3);
  return out;
}

Outcome measure_zero_ties() {
  Outcome out;
  std::ostringstream detail;
  const std::vector<double> thresholds{1e-9, 1e-3, 1e-2, 1e-1};
  for (const Run* run : {&run_n2m2(2), &run_n3m2()}) {
    const auto ties = summarize_margins(
        [&] {
          std::vector<double> m;
          for (const auto& o : run->outcomes) m.push_back(o.effective_margin);
          return m;
        }(),
        thresholds, 1e-9);
    bool ok = ties.tie_counts[0] == 0;
    for (std::size_t t = 2; t < ties.tie_counts.size(); ++t) {
      ok = ok && ties.tie_counts[t] > ties.tie_counts[t - 1];
    }
    out.passed = out.passed && ok;
    detail << run->label << ": counts";
    for (auto c : ties.tie_counts) detail << " " << c;
    detail << "; ";
  }
  out.detail = detail.str();
  return out;
}

Outcome closed_form_vs_series() {
  Outcome out;
  double worst = 0.0;
  const double gammas[] = {0.5, 0.9, 0.99};
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 5;
    const std::size_t m = 2 + (k / 5) % 3;
    auto rng = make_stream(5005, StreamTag::environment_sample, k);
    const auto env = sample_uniform_environment(n, m, rng);
    const auto policy = policy_from_index({mix64(k) % policy_count(n, m)}, n, m);
    std::vector<double> r(n);
    for (auto& x : r) x = 0.01 + 0.98 * uniform_open01(rng);
    const RewardFunction reward(r);
    const double gamma = gammas[k % 3];
    const auto v0 = StateDistribution::uniform(n);
    const double closed = discounted_value(env, policy, reward, gamma, v0);
    const double series = discounted_value_series_oracle(env, policy, reward, gamma, v0, 1e-13);
    worst = std::max(worst, std::abs(closed - series));
  }
  out.passed = worst < 1e-10;
  out.detail = "1000 triples, max |closed - series|=" + fmt(worst, 3);
  return out;
}

StochasticMatrix positive_matrix(std::size_t n, std::uint64_t k, double floor) {
  auto rng = make_stream(6006, StreamTag::environment_sample, k);
  const auto env = sample_uniform_environment(n, 2, rng);
  Eigen::MatrixXd m = induced_transition_matrix(env, Policy{std::vector<std::size_t>(n, 1)}).matrix();
  const double nd = static_cast<double>(n);
  m = (1.0 - nd * floor) * m + Eigen::MatrixXd::Constant(m.rows(), m.cols(), floor);
  return StochasticMatrix(m);
}

Outcome stationary_vs_power() {
  Outcome out;
  double worst_l1 = 0.0;
  double worst_cesaro = 0.0;
  std::size_t cesaro_cases = 0;
  std::size_t solved = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto m = positive_matrix(n, k, 0.0);
    if (!(m.min_coeff() > 0.0)) continue;
    ++solved;
    const auto direct = stationary_distribution(m);
    const auto power = stationary_distribution_power_oracle(m, 1e-13);
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::abs(direct.mu[i] - power.mu[i]);
    worst_l1 = std::max(worst_l1, l1);
  }
  for (std::uint64_t k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto m = positive_matrix(n, 10'000 + k, 0.05);
    if (m.min_coeff() < 0.05 - 1e-15) continue;
    ++cesaro_cases;
    auto rng = make_stream(6007, StreamTag::reward, k);
    std::vector<double> r(n);
    for (auto& x : r) x = 0.01 + 0.98 * uniform_open01(rng);
    r[0] = 0.01;
    r[n - 1] = 0.99;
    const RewardFunction reward(r);
    const auto v0 = StateDistribution::point_mass(n, k % n);
    worst_cesaro = std::max(
        worst_cesaro, std::abs(cesaro_average_reward(m, reward, v0, 10'000) - time_averaged_value(m, reward)));
  }
  out.passed = worst_l1 < 1e-8 && worst_cesaro <= 1e-3 && solved == 1000 && cesaro_cases > 0;
  out.detail = std::to_string(solved) + " matrices, max L1=" + fmt(worst_l1, 3) + "; " + std::to_string(cesaro_cases) +
               " Cesaro cases, max gap=" + fmt(worst_cesaro, 3);
  return out;
}

Outcome symmetry_transport() {
  ExperimentConfig config;
  config.states = 2;
  config.actions = 2;
  config.spec = ValueSpec(TimeAveraged{});
  config.reward = std::vector<double>{0.2, 0.8};
  config.samples = 10'000;
  config.transport_samples = 10'000;
  config.master_seed = 7007;
  const auto r = resolve_reward(config);
  const auto pairs = all_swap_pairs(2, 2);
  const auto report = run_symmetry_transport(config, r, pairs);
  std::uint64_t involution = 0;
  std::uint64_t checked = 0;
  for (const auto& p : report.pairs) {
    involution += p.involution_violations;
    checked += p.optimality_checked;
  }
  Outcome out;
  out.passed = report.total_violations() == 0 && report.samples == 10'000 && pairs.size() == 6;
  out.detail = std::to_string(report.samples) + " samples x " + std::to_string(pairs.size()) +
               " pairs, violations=" + std::to_string(report.total_violations()) +
               " (involution " + std::to_string(involution) + "), optimality checks=" +
               std::to_string(checked);
  return out;
}

Outcome separating_constructions() {
  Outcome out;
  const auto policies = enumerate_policies(3, 2);
  std::vector<RewardFunction> rewards{RewardFunction({0.2, 0.7, 0.4}),
                                      RewardFunction({0.9, 0.1, 0.5}),
                                      RewardFunction({0.3, 0.3, 0.6})};
  std::size_t checks = 0;
  std::size_t failures = 0;
  double smallest = INFINITY;
  for (const auto& reward : rewards) {
    for (const auto& pi_i : policies) {
      for (const auto& pi_j : policies) {
        if (pi_i == pi_j) continue;
        for (double eps : {0.0, 0.01, 0.1}) {
          const auto env = construct_separating_environment(3, 2, pi_i, pi_j, reward, eps);
          std::vector<ValueSpec> specs{ValueSpec(Discounted{0.9}), ValueSpec(FiniteHorizon{5, 1.0})};
          if (eps > 0.0) specs.emplace_back(TimeAveraged{});
          for (const auto& spec : specs) {
            const double margin =
                policy_value(env, pi_i, spec, reward) - policy_value(env, pi_j, spec, reward);
            ++checks;
            smallest = std::min(smallest, margin);
            if (!(margin > 0.0)) ++failures;
          }
        }
      }
    }
  }
  out.passed = failures == 0;
  out.detail = std::to_string(checks) + " (pair, eps, regime, reward) cases, failures=" +
               std::to_string(failures) + ", min margin=" + fmt(smallest, 3);
  return out;
}

Outcome determinism() {
  ExperimentConfig config;
  config.states = 3;
  config.actions = 2;
  config.spec = ValueSpec(Discounted{0.9});
  config.samples = 20'000;
  config.transport_samples = 1'000;
  config.master_seed = 9009;
  std::vector<std::string> reference;
  Outcome out;
  for (std::size_t workers : {1u, 3u, 8u}) {
    config.workers = workers;
    const auto report = run_full_report(config);
    const std::vector<std::string> files{
        report_to_json(report),
        frequency_to_json(report.frequency),
        frequency_to_csv(report.frequency, "x"),
        entropy_to_json(report.entropy),
        ties_to_json(report.ties),
        ties_to_csv(report.ties, "x"),
        transport_to_json(report.transport),
        transport_to_csv(report.transport, "x")};
    if (reference.empty()) {
      reference = files;
    } else if (files != reference) {
      out.passed = false;
    }
  }
  out.detail = "workers 1/3/8, " + std::to_string(reference.size()) + " report files compared";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "equal-volume partition", equal_volume_partition},
      {2, "policy entropy n log2 m", entropy_matches_n_log_m},
      {3, "entropy upper bound", entropy_upper_bound},
      {4, "measure-zero ties", measure_zero_ties},
      {5, "closed form vs series", closed_form_vs_series},
      {6, "stationary solve vs power iteration", stationary_vs_power},
      {7, "symmetry transport", symmetry_transport},
      {8, "separating constructions", separating_constructions},
      {9, "determinism across worker counts", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.passed) ++failed;
    std::printf("criterion %d %s: %s (%s)\n", c.id, c.name, outcome.passed ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
