#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cmplab/environment.hpp"
#include "cmplab/policy.hpp"
#include "cmplab/value.hpp"

namespace cmplab {

inline constexpr double kDefaultTieTolerance = 1e-9;

struct PolicyValue {
  PolicyIndex index;
  double value;
};

struct OptimalityResult {
  /// Exact argmax; lowest index among exactly equal values.
  PolicyIndex best;
  double best_value = 0.0;
  /// best_value minus the best value outside the tie set, 0 if everything ties.
  double runner_up_margin = 0.0;
  /// Policies within tie_tolerance * |best_value| of the best, in index order.
  std::vector<PolicyIndex> tie_set;

  bool tied() const noexcept { return tie_set.size() > 1; }
};

struct OptimalityOptions {
  double tie_tolerance = kDefaultTieTolerance;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Values of all m^n policies in index order.
std::vector<PolicyValue> value_table(const Environment& env, const ValueSpec& spec,
                                     const RewardFunction& r,
                                     std::uint64_t cap = kDefaultEnumerationCap);

/// Argmax, tie set and margin of an arbitrary-order table. The result does not
/// depend on the order of the entries.
OptimalityResult summarize_value_table(std::span<const PolicyValue> table, double tie_tolerance);

/// Exhaustive search over every deterministic policy: the ground truth the
/// faster solvers are checked against.
OptimalityResult best_policy_exhaustive(const Environment& env, const ValueSpec& spec,
                                        const RewardFunction& r,
                                        const OptimalityOptions& options = {});

/**
 * Howard policy iteration on state values for the discounted regime.
 *
 * The fixed point is optimal from every start state, hence for every v0; v0
 * is only checked for dimension. Improvement switches an action only on a
 * strict gain, which rules out cycling between equal-valued policies.
 */
PolicyIndex policy_iteration_discounted(const Environment& env, const RewardFunction& r,
                                        double gamma, const StateDistribution& v0);

}  // namespace cmplab
