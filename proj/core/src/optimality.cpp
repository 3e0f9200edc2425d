#include "cmplab/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "cmplab/errors.hpp"

namespace cmplab {

std::vector<PolicyValue> value_table(const Environment& env, const ValueSpec& spec,
                                     const RewardFunction& r, std::uint64_t cap) {
  if (r.size() != env.states()) throw DimensionError("reward and environment sizes differ");
  spec.check_states(env.states());
  if (spec.is_time_averaged() && !(min_entry(env) > 0.0)) {
    throw InteriorityError(
        "time-averaged optimization requires an interior environment (every "
        "transition probability > 0)");
  }
  const PolicySpace space(env.states(), env.actions(), cap);
  std::vector<PolicyValue> table;
  table.reserve(space.size());
  for (auto it = space.begin(); it != space.end(); ++it) {
    table.push_back({it.index(), evaluate(induced_transition_matrix(env, *it), spec, r)});
  }
  return table;
}

OptimalityResult summarize_value_table(std::span<const PolicyValue> table, double tie_tolerance) {
  if (table.empty()) throw std::invalid_argument("empty value table");
  if (!(tie_tolerance >= 0.0)) throw std::invalid_argument("tie tolerance must be >= 0");

  const PolicyValue* best = &table.front();
  for (const auto& entry : table) {
    if (entry.value > best->value || (entry.value == best->value && entry.index < best->index)) {
      best = &entry;
    }
  }

  OptimalityResult result;
  result.best = best->index;
  result.best_value = best->value;
  const double window = tie_tolerance * std::abs(best->value);
  bool have_outside = false;
  double best_outside = 0.0;
  for (const auto& entry : table) {
    if (best->value - entry.value <= window) {
      result.tie_set.push_back(entry.index);
    } else if (!have_outside || entry.value > best_outside) {
      best_outside = entry.value;
      have_outside = true;
    }
  }
  std::sort(result.tie_set.begin(), result.tie_set.end());
  result.runner_up_margin = have_outside ? best->value - best_outside : 0.0;
  return result;
}

OptimalityResult best_policy_exhaustive(const Environment& env, const ValueSpec& spec,
                                        const RewardFunction& r,
                                        const OptimalityOptions& options) {
  const auto table = value_table(env, spec, r, options.enumeration_cap);
  return summarize_value_table(table, options.tie_tolerance);
}

PolicyIndex policy_iteration_discounted(const Environment& env, const RewardFunction& r,
                                        double gamma, const StateDistribution& v0) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("policy iteration needs 0 < gamma < 1");
  }
  const auto n = env.states();
  const auto m = env.actions();
  if (r.size() != n || v0.size() != n) throw DimensionError("reward/v0 size mismatch");
  // Each round strictly improves on a finite set, so m^n rounds always suffice.
  std::uint64_t max_rounds = 1;
  for (std::size_t s = 0; s < n && max_rounds < (std::uint64_t{1} << 40); ++s) max_rounds *= m;

  const Eigen::Map<const Eigen::VectorXd> reward(r.values().data(), static_cast<Eigen::Index>(n));
  Policy policy{std::vector<std::size_t>(n, 0)};
  Eigen::VectorXd next_value(n);  // r + V, the payoff of landing in each state

  auto q = [&](std::size_t s, std::size_t a) {
    const auto row = env.row(s, a);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += row[k] * next_value(static_cast<Eigen::Index>(k));
    return gamma * total;
  };

  for (std::uint64_t round = 0; round < max_rounds; ++round) {
    // Evaluate: V = gamma M^T (r + V)  <=>  (I - gamma M^T) V = gamma M^T r.
    const Eigen::MatrixXd mt = induced_transition_matrix(env, policy).matrix().transpose();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * mt;
    const Eigen::VectorXd value = system.partialPivLu().solve(gamma * (mt * reward));
    next_value = reward + value;

    bool changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      const double current = q(s, policy[s]);
      std::size_t best_action = policy[s];
      double best_q = current;
      for (std::size_t a = 0; a < m; ++a) {
        const double candidate = q(s, a);
        if (candidate > best_q) {
          best_q = candidate;
          best_action = a;
        }
      }
      if (best_action != policy[s] && best_q - current > 1e-12 * std::abs(current)) {
        policy.actions[s] = best_action;
        changed = true;
      }
    }
    if (!changed) return index_from_policy(policy, m);
  }
  throw SolveError("policy iteration did not converge within m^n rounds");
}

}  // namespace cmplab
