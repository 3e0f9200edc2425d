#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmplab/random.hpp"

namespace cmplab {

inline constexpr double kRowSumTolerance = 1e-12;

/**
 * A controlled Markov process: n states, m actions and a transition kernel
 * P(s'|s,a), one point of the product of nm probability simplexes.
 *
 * Storage is a flat row-major tensor indexed [state][action][next_state], so
 * the (s, a) row is the contiguous range starting at (s*m + a)*n.
 *
 * Construction checks shape only. Probability constraints are checked by
 * validate_environment(), which reports rather than throws, because boundary
 * and deliberately broken environments are legitimate inputs for diagnostics.
 */
class Environment {
 public:
  Environment(std::size_t states, std::size_t actions, std::vector<double> probabilities);

  /// Every entry 1/n: every policy induces the same all-1/n matrix.
  static Environment uniform_chain(std::size_t states, std::size_t actions);

  std::size_t states() const noexcept { return states_; }
  std::size_t actions() const noexcept { return actions_; }

  double operator()(std::size_t s, std::size_t a, std::size_t next) const {
    return p_[offset(s, a) + next];
  }
  std::span<const double> row(std::size_t s, std::size_t a) const {
    return {p_.data() + offset(s, a), states_};
  }
  std::span<const double> data() const noexcept { return p_; }

  /// Exact (bitwise) equality of shape and entries.
  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  std::size_t offset(std::size_t s, std::size_t a) const noexcept {
    return (s * actions_ + a) * states_;
  }

  std::size_t states_;
  std::size_t actions_;
  std::vector<double> p_;
};

/// A probability vector over states.
class StateDistribution {
 public:
  /// Throws std::invalid_argument unless entries are >= 0 and sum to 1 within tol.
  explicit StateDistribution(std::vector<double> v, double tol = kRowSumTolerance);

  static StateDistribution uniform(std::size_t states);
  static StateDistribution point_mass(std::size_t states, std::size_t state);

  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> values() const noexcept { return v_; }
  bool has_full_support() const noexcept;

  friend bool operator==(const StateDistribution&, const StateDistribution&) = default;

 private:
  std::vector<double> v_;
};

/// Uniform draw from the environment space: every (s, a) row is an independent
/// flat-Dirichlet point, built from n normalized unit-rate exponentials.
Environment sample_uniform_environment(std::size_t states, std::size_t actions,
                                       RandomStream& rng);

struct RowViolation {
  std::size_t state;
  std::size_t action;
  double row_sum;
};

struct EntryViolation {
  std::size_t state;
  std::size_t action;
  std::size_t next_state;
  double value;
};

struct ValidationResult {
  std::vector<RowViolation> bad_row_sums;
  std::vector<EntryViolation> out_of_range;

  bool ok() const noexcept { return bad_row_sums.empty() && out_of_range.empty(); }
  std::string describe() const;
};

ValidationResult validate_environment(const Environment& env, double tol = kRowSumTolerance);

/// Smallest transition probability; > 0 means the environment is interior.
double min_entry(const Environment& env);

}  // namespace cmplab
