#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cmplab/environment.hpp"
#include "cmplab/policy.hpp"

namespace cmplab {

/// Fixed-point residual accepted from the direct stationary solve.
inline constexpr double kStationaryResidualTolerance = 1e-10;
/// Condition number estimate beyond which the direct solve is not trusted.
inline constexpr double kConditionFallbackThreshold = 1e12;

/// State reward r: S -> (0, 1), required to be non-constant.
class RewardFunction {
 public:
  explicit RewardFunction(std::vector<double> r);

  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  std::span<const double> values() const noexcept { return r_; }
  double max() const noexcept { return max_; }
  double min() const noexcept { return min_; }
  /// Lowest-index state with the largest reward.
  std::size_t argmax() const noexcept { return argmax_; }

 private:
  std::vector<double> r_;
  double max_;
  double min_;
  std::size_t argmax_;
};

/// sum_{t>=1} gamma^t E[r(S_t)], 0 < gamma < 1.
struct Discounted {
  double gamma;
};

/// sum_{t=1}^{T} gamma^t E[r(S_t)], 0 < gamma <= 1.
struct FiniteHorizon {
  std::size_t horizon;
  double gamma = 1.0;
};

/// lim (1/T) sum_{t=1}^{T} E[r(S_t)], equal to R(mu) at the stationary distribution.
struct TimeAveraged {};

using Regime = std::variant<Discounted, FiniteHorizon, TimeAveraged>;

/**
 * Value regime plus initial state distribution. When v0 is omitted the
 * uniform distribution is used.
 *
 * Construction rejects out-of-range discount rates and the degenerate
 * FiniteHorizon{T=1} case where v0 lacks full support: there two policies
 * differing only on unvisited states tie in every environment.
 */
class ValueSpec {
 public:
  explicit ValueSpec(Regime regime, std::optional<StateDistribution> v0 = std::nullopt);

  const Regime& regime() const noexcept { return regime_; }
  const std::optional<StateDistribution>& v0() const noexcept { return v0_; }
  /// v0 if given, otherwise uniform over the given number of states.
  StateDistribution initial(std::size_t states) const;
  /// Throws DimensionError if an explicit v0 does not match.
  void check_states(std::size_t states) const;
  bool is_time_averaged() const noexcept { return std::holds_alternative<TimeAveraged>(regime_); }

 private:
  Regime regime_;
  std::optional<StateDistribution> v0_;
};

/// R(v) = sum_i r_i v_i.
double expected_reward(const RewardFunction& r, std::span<const double> v);
double expected_reward(const RewardFunction& r, const StateDistribution& v);
double expected_reward(const RewardFunction& r, const Eigen::VectorXd& v);

/// Closed form R(w) with (I - gamma M) w = gamma M v0, solved by LU factorization.
double discounted_value(const StochasticMatrix& m, const RewardFunction& r, double gamma,
                        const StateDistribution& v0);
double discounted_value(const Environment& env, const Policy& policy, const RewardFunction& r,
                        double gamma, const StateDistribution& v0);

/// Truncated power series sum_t gamma^t R(M^t v0); stops once the geometric
/// tail bound gamma^{T+1} max(r) / (1 - gamma) drops below tol.
double discounted_value_series_oracle(const StochasticMatrix& m, const RewardFunction& r,
                                      double gamma, const StateDistribution& v0, double tol);
double discounted_value_series_oracle(const Environment& env, const Policy& policy,
                                      const RewardFunction& r, double gamma,
                                      const StateDistribution& v0, double tol);
/// Number of series terms the oracle accumulates for these parameters.
std::size_t discounted_series_terms(double gamma, double max_reward, double tol);

/// v <- M v applied exactly T times; the reward at t = 0 is not counted.
double finite_horizon_value(const StochasticMatrix& m, const RewardFunction& r, double gamma,
                            std::size_t horizon, const StateDistribution& v0);
double finite_horizon_value(const Environment& env, const Policy& policy,
                            const RewardFunction& r, double gamma, std::size_t horizon,
                            const StateDistribution& v0);

enum class StationaryMethod { direct_solve, power_iteration };

struct StationaryDistribution {
  StateDistribution mu;
  /// ||M mu - mu||_1
  double residual = 0.0;
  StationaryMethod method = StationaryMethod::direct_solve;
  /// True when the direct solve was rejected and power iteration used instead.
  bool used_fallback = false;
  /// Estimated condition number of the bordered system (direct solve only).
  double condition_estimate = 0.0;
  std::size_t iterations = 0;
};

/**
 * Stationary distribution of a strictly positive column-stochastic matrix.
 *
 * Solves B mu = e_n where B is M - I with its last row replaced by ones. The
 * replaced row carries the normalization, which makes B nonsingular for an
 * irreducible chain. Falls back to power iteration (flagged in the result)
 * when the condition estimate exceeds 1e12 or the residual exceeds 1e-10.
 *
 * Throws InteriorityError if any entry of M is not strictly positive.
 */
StationaryDistribution stationary_distribution(const StochasticMatrix& m);

/// Repeated application of M to the uniform vector until successive iterates
/// differ by less than tol in L1. Throws SolveError after max_iters.
StationaryDistribution stationary_distribution_power_oracle(const StochasticMatrix& m,
                                                            double tol = 1e-12,
                                                            std::size_t max_iters = 100'000);

/// R(mu) for the policy's induced chain. Throws InteriorityError unless
/// min_entry(env) > 0.
double time_averaged_value(const Environment& env, const Policy& policy, const RewardFunction& r);
/// Matrix form; requires M itself to be strictly positive.
double time_averaged_value(const StochasticMatrix& m, const RewardFunction& r);

/// (1/T) sum_{t=1}^{T} R(M^t v0): the running average the time-averaged value
/// is the limit of.
double cesaro_average_reward(const StochasticMatrix& m, const RewardFunction& r,
                             const StateDistribution& v0, std::size_t horizon);

/// Value of the chain M under spec. Policies enter only through M.
double evaluate(const StochasticMatrix& m, const ValueSpec& spec, const RewardFunction& r);
/// Value of a policy in an environment; TimeAveraged checks interiority of env.
double policy_value(const Environment& env, const Policy& policy, const ValueSpec& spec,
                    const RewardFunction& r);

}  // namespace cmplab
