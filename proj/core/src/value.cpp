#include "cmplab/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

#include "cmplab/errors.hpp"

namespace cmplab {

namespace {

Eigen::VectorXd to_vector(const StateDistribution& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

void require_same_size(const StochasticMatrix& m, const RewardFunction& r,
                       const StateDistribution& v0) {
  if (r.size() != m.size() || v0.size() != m.size()) {
    throw DimensionError("matrix is " + std::to_string(m.size()) + "x" +
                         std::to_string(m.size()) + " but reward has " +
                         std::to_string(r.size()) + " and v0 has " + std::to_string(v0.size()) +
                         " entries");
  }
}

void require_discount(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discounted value needs 0 < gamma < 1, got " +
                                std::to_string(gamma));
  }
}

void require_positive(const StochasticMatrix& m) {
  if (!(m.min_coeff() > 0.0)) {
    throw InteriorityError(
        "stationary distribution requires a strictly positive transition matrix "
        "(interior environment, min entry > 0)");
  }
}

StateDistribution to_distribution(Eigen::VectorXd v) {
  v = v.cwiseMax(0.0);
  v /= v.sum();
  return StateDistribution(std::vector<double>(v.data(), v.data() + v.size()), 1e-9);
}

}  // namespace

RewardFunction::RewardFunction(std::vector<double> r) : r_(std::move(r)) {
  if (r_.size() < 2) throw std::invalid_argument("reward needs at least 2 states");
  for (double x : r_) {
    if (!(x > 0.0 && x < 1.0)) {
      throw std::invalid_argument("reward entries must lie in the open interval (0, 1)");
    }
  }
  const auto [lo, hi] = std::minmax_element(r_.begin(), r_.end());
  min_ = *lo;
  max_ = *hi;
  argmax_ = static_cast<std::size_t>(std::distance(r_.begin(), std::max_element(r_.begin(), r_.end())));
  if (!(max_ > min_)) throw std::invalid_argument("reward must be non-constant");
}

ValueSpec::ValueSpec(Regime regime, std::optional<StateDistribution> v0)
    : regime_(regime), v0_(std::move(v0)) {
  if (const auto* d = std::get_if<Discounted>(&regime_)) {
    require_discount(d->gamma);
  } else if (const auto* f = std::get_if<FiniteHorizon>(&regime_)) {
    if (f->horizon < 1) throw std::invalid_argument("finite horizon needs T >= 1");
    if (!(f->gamma > 0.0 && f->gamma <= 1.0)) {
      throw std::invalid_argument("finite horizon needs 0 < gamma <= 1, got " +
                                  std::to_string(f->gamma));
    }
    if (f->horizon == 1 && v0_ && !v0_->has_full_support()) {
      throw DegenerateHorizonError(
          "finite horizon T=1 needs an initial distribution with full support "
          "(T>1 or full-support v0); otherwise policies differing only on "
          "zero-probability states tie in every environment");
    }
  }
}

StateDistribution ValueSpec::initial(std::size_t states) const {
  if (v0_) {
    check_states(states);
    return *v0_;
  }
  return StateDistribution::uniform(states);
}

void ValueSpec::check_states(std::size_t states) const {
  if (v0_ && v0_->size() != states) {
    throw DimensionError("v0 has " + std::to_string(v0_->size()) + " entries, expected " +
                         std::to_string(states));
  }
}

double expected_reward(const RewardFunction& r, std::span<const double> v) {
  if (v.size() != r.size()) {
    throw DimensionError("reward has " + std::to_string(r.size()) +
                         " entries, distribution has " + std::to_string(v.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += r[i] * v[i];
  return total;
}

double expected_reward(const RewardFunction& r, const StateDistribution& v) {
  return expected_reward(r, v.values());
}

double expected_reward(const RewardFunction& r, const Eigen::VectorXd& v) {
  return expected_reward(r, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

double discounted_value(const StochasticMatrix& m, const RewardFunction& r, double gamma,
                        const StateDistribution& v0) {
  require_discount(gamma);
  require_same_size(m, r, v0);
  const Eigen::MatrixXd& mat = m.matrix();
  const auto n = mat.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * mat;
  const Eigen::VectorXd rhs = gamma * (mat * to_vector(v0));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  // Spectral radius of gamma*M is below 1, so this only trips on NaN input.
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw SolveError("discounted value: (I - gamma M) is numerically singular");
  }
  return expected_reward(r, Eigen::VectorXd(lu.solve(rhs)));
}

double discounted_value(const Environment& env, const Policy& policy, const RewardFunction& r,
                        double gamma, const StateDistribution& v0) {
  return discounted_value(induced_transition_matrix(env, policy), r, gamma, v0);
}

std::size_t discounted_series_terms(double gamma, double max_reward, double tol) {
  require_discount(gamma);
  std::size_t terms = 0;
  double weight = gamma;  // gamma^{T+1} with T = terms
  const double scale = max_reward / (1.0 - gamma);
  while (weight * scale >= tol) {
    weight *= gamma;
    ++terms;
  }
  return terms;
}

double discounted_value_series_oracle(const StochasticMatrix& m, const RewardFunction& r,
                                      double gamma, const StateDistribution& v0, double tol) {
  require_same_size(m, r, v0);
  const std::size_t terms = discounted_series_terms(gamma, r.max(), tol);
  Eigen::VectorXd v = to_vector(v0);
  double weight = 1.0;
  double total = 0.0;
  for (std::size_t t = 1; t <= terms; ++t) {
    v = m.matrix() * v;
    weight *= gamma;
    total += weight * expected_reward(r, v);
  }
  return total;
}

double discounted_value_series_oracle(const Environment& env, const Policy& policy,
                                      const RewardFunction& r, double gamma,
                                      const StateDistribution& v0, double tol) {
  return discounted_value_series_oracle(induced_transition_matrix(env, policy), r, gamma, v0, tol);
}

double finite_horizon_value(const StochasticMatrix& m, const RewardFunction& r, double gamma,
                            std::size_t horizon, const StateDistribution& v0) {
  // Re-checks the regime constraints, including the T=1 support rule.
  const ValueSpec spec(FiniteHorizon{horizon, gamma}, v0);
  require_same_size(m, r, v0);
  Eigen::VectorXd v = to_vector(v0);
  double weight = 1.0;
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    v = m.matrix() * v;
    weight *= gamma;
    total += weight * expected_reward(r, v);
  }
  return total;
}

double finite_horizon_value(const Environment& env, const Policy& policy,
                            const RewardFunction& r, double gamma, std::size_t horizon,
                            const StateDistribution& v0) {
  return finite_horizon_value(induced_transition_matrix(env, policy), r, gamma, horizon, v0);
}

StationaryDistribution stationary_distribution(const StochasticMatrix& m) {
  require_positive(m);
  const Eigen::MatrixXd& mat = m.matrix();
  const auto n = mat.rows();

  Eigen::MatrixXd bordered = mat - Eigen::MatrixXd::Identity(n, n);
  bordered.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bordered);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (condition <= kConditionFallbackThreshold) {
    Eigen::VectorXd mu = lu.solve(rhs);
    const double residual = (mat * mu - mu).lpNorm<1>();
    if (mu.allFinite() && residual < kStationaryResidualTolerance) {
      return {to_distribution(std::move(mu)), residual, StationaryMethod::direct_solve, false,
              condition, 0};
    }
  }
  auto fallback = stationary_distribution_power_oracle(m);
  fallback.used_fallback = true;
  fallback.condition_estimate = condition;
  return fallback;
}

StationaryDistribution stationary_distribution_power_oracle(const StochasticMatrix& m, double tol,
                                                            std::size_t max_iters) {
  require_positive(m);
  const Eigen::MatrixXd& mat = m.matrix();
  const auto n = mat.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= max_iters; ++k) {
    Eigen::VectorXd next = mat * v;
    delta = (next - v).lpNorm<1>();
    v = std::move(next);
    if (delta < tol) {
      const double residual = (mat * v - v).lpNorm<1>();
      return {to_distribution(std::move(v)), residual, StationaryMethod::power_iteration, false,
              0.0, k};
    }
  }
  std::ostringstream os;
  os.precision(3);
  os << "power iteration did not converge in " << max_iters
     << " iterations (final L1 step " << std::scientific << delta << ")";
  throw SolveError(os.str());
}

double time_averaged_value(const StochasticMatrix& m, const RewardFunction& r) {
  if (r.size() != m.size()) throw DimensionError("reward and matrix sizes differ");
  return expected_reward(r, stationary_distribution(m).mu);
}

double time_averaged_value(const Environment& env, const Policy& policy, const RewardFunction& r) {
  if (!(min_entry(env) > 0.0)) {
    throw InteriorityError(
        "time-averaged value requires an interior environment (every transition "
        "probability > 0); this environment lies on the boundary");
  }
  return time_averaged_value(induced_transition_matrix(env, policy), r);
}

double cesaro_average_reward(const StochasticMatrix& m, const RewardFunction& r,
                             const StateDistribution& v0, std::size_t horizon) {
  require_same_size(m, r, v0);
  if (horizon == 0) throw std::invalid_argument("Cesaro average needs T >= 1");
  Eigen::VectorXd v = to_vector(v0);
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    v = m.matrix() * v;
    total += expected_reward(r, v);
  }
  return total / static_cast<double>(horizon);
}

double evaluate(const StochasticMatrix& m, const ValueSpec& spec, const RewardFunction& r) {
  return std::visit(
      [&](const auto& regime) -> double {
        using T = std::decay_t<decltype(regime)>;
        if constexpr (std::is_same_v<T, Discounted>) {
          return discounted_value(m, r, regime.gamma, spec.initial(m.size()));
        } else if constexpr (std::is_same_v<T, FiniteHorizon>) {
          return finite_horizon_value(m, r, regime.gamma, regime.horizon, spec.initial(m.size()));
        } else {
          return time_averaged_value(m, r);
        }
      },
      spec.regime());
}

double policy_value(const Environment& env, const Policy& policy, const ValueSpec& spec,
                    const RewardFunction& r) {
  if (spec.is_time_averaged()) return time_averaged_value(env, policy, r);
  return evaluate(induced_transition_matrix(env, policy), spec, r);
}

}  // namespace cmplab
