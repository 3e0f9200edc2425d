#include "cmplab/policy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cmplab/errors.hpp"

namespace cmplab {

std::string to_string(const Policy& policy) {
  std::string out = "[";
  for (std::size_t s = 0; s < policy.actions.size(); ++s) {
    if (s) out += ',';
    out += std::to_string(policy.actions[s]);
  }
  return out + "]";
}

std::uint64_t policy_count(std::size_t states, std::size_t actions, std::uint64_t cap) {
  if (actions == 0) return 0;
  std::uint64_t count = 1;
  for (std::size_t s = 0; s < states; ++s) {
    if (count > std::numeric_limits<std::uint64_t>::max() / actions || count * actions > cap) {
      throw EnumerationCapError("m^n = " + std::to_string(actions) + "^" +
                                std::to_string(states) + " exceeds the enumeration cap of " +
                                std::to_string(cap) + " policies");
    }
    count *= actions;
  }
  return count;
}

Policy policy_from_index(PolicyIndex index, std::size_t states, std::size_t actions) {
  const auto count = policy_count(states, actions, std::numeric_limits<std::uint64_t>::max());
  if (index.value >= count) {
    throw std::out_of_range("policy index " + std::to_string(index.value) +
                            " out of range [0, " + std::to_string(count) + ")");
  }
  Policy policy{std::vector<std::size_t>(states)};
  auto rest = index.value;
  for (std::size_t s = 0; s < states; ++s) {
    policy.actions[s] = static_cast<std::size_t>(rest % actions);
    rest /= actions;
  }
  return policy;
}

PolicyIndex index_from_policy(const Policy& policy, std::size_t actions) {
  std::uint64_t value = 0;
  for (std::size_t s = policy.actions.size(); s-- > 0;) {
    if (policy.actions[s] >= actions) {
      throw std::out_of_range("action " + std::to_string(policy.actions[s]) + " in state " +
                              std::to_string(s) + " is not below m = " + std::to_string(actions));
    }
    value = value * actions + policy.actions[s];
  }
  return {value};
}

PolicySpace::PolicySpace(std::size_t states, std::size_t actions, std::uint64_t cap)
    : states_(states), actions_(actions), count_(policy_count(states, actions, cap)) {}

PolicySpace::iterator::iterator(std::size_t states, std::size_t actions, std::uint64_t position)
    : actions_(actions), position_(position), current_{std::vector<std::size_t>(states, 0)} {
  if (position != 0) {
    auto rest = position;
    for (std::size_t s = 0; s < states; ++s) {
      current_.actions[s] = static_cast<std::size_t>(rest % actions);
      rest /= actions;
    }
  }
}

PolicySpace::iterator& PolicySpace::iterator::operator++() {
  ++position_;
  for (auto& digit : current_.actions) {
    if (++digit < actions_) break;
    digit = 0;
  }
  return *this;
}

std::vector<Policy> enumerate_policies(std::size_t states, std::size_t actions,
                                       std::uint64_t cap) {
  const PolicySpace space(states, actions, cap);
  return {space.begin(), space.end()};
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DimensionError("stochastic matrix must be square and non-empty");
  }
  if (!((m_.array() >= 0.0) && (m_.array() <= 1.0)).all()) {
    throw std::invalid_argument("stochastic matrix entries must lie in [0, 1]");
  }
  const Eigen::RowVectorXd sums = m_.colwise().sum();
  for (Eigen::Index j = 0; j < sums.size(); ++j) {
    if (std::abs(sums(j) - 1.0) > tol) {
      std::ostringstream os;
      os.precision(17);
      os << "column " << j << " of stochastic matrix sums to " << sums(j);
      throw std::invalid_argument(os.str());
    }
  }
}

StochasticMatrix induced_transition_matrix(const Environment& env, const Policy& policy) {
  const auto n = env.states();
  if (policy.states() != n) {
    throw DimensionError("policy covers " + std::to_string(policy.states()) +
                         " states, environment has " + std::to_string(n));
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (policy[j] >= env.actions()) {
      throw DimensionError("policy action " + std::to_string(policy[j]) + " in state " +
                           std::to_string(j) + " exceeds m = " + std::to_string(env.actions()));
    }
    const auto row = env.row(j, policy[j]);
    for (std::size_t i = 0; i < n; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[i];
    }
  }
  return StochasticMatrix(std::move(m));
}

}  // namespace cmplab
