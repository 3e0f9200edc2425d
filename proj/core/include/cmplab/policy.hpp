#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cmplab/environment.hpp"

namespace cmplab {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Position of a policy in the enumeration order, in [0, m^n).
struct PolicyIndex {
  std::uint64_t value = 0;

  friend auto operator<=>(const PolicyIndex&, const PolicyIndex&) = default;
};

/// Deterministic Markovian policy: one action per state.
struct Policy {
  std::vector<std::size_t> actions;

  std::size_t states() const noexcept { return actions.size(); }
  std::size_t operator[](std::size_t s) const { return actions[s]; }

  friend bool operator==(const Policy&, const Policy&) = default;
};

/// "[2,1]"
std::string to_string(const Policy& policy);

/// m^n, or throws EnumerationCapError when it exceeds cap (or overflows).
std::uint64_t policy_count(std::size_t states, std::size_t actions,
                           std::uint64_t cap = kDefaultEnumerationCap);

/// Little-endian base-m decoding: state 0 is the least significant digit.
Policy policy_from_index(PolicyIndex index, std::size_t states, std::size_t actions);
PolicyIndex index_from_policy(const Policy& policy, std::size_t actions);

/**
 * All m^n deterministic policies in index order. Iteration advances a base-m
 * odometer, so position k yields policy_from_index(k).
 */
class PolicySpace {
 public:
  PolicySpace(std::size_t states, std::size_t actions,
              std::uint64_t cap = kDefaultEnumerationCap);

  std::size_t states() const noexcept { return states_; }
  std::size_t actions() const noexcept { return actions_; }
  std::uint64_t size() const noexcept { return count_; }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Policy;
    using difference_type = std::ptrdiff_t;
    using pointer = const Policy*;
    using reference = const Policy&;

    iterator() = default;
    iterator(std::size_t states, std::size_t actions, std::uint64_t position);

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    PolicyIndex index() const noexcept { return {position_}; }

    friend bool operator==(const iterator& a, const iterator& b) noexcept {
      return a.position_ == b.position_;
    }

   private:
    std::size_t actions_ = 0;
    std::uint64_t position_ = 0;
    Policy current_;
  };

  iterator begin() const { return {states_, actions_, 0}; }
  iterator end() const { return {states_, actions_, count_}; }

 private:
  std::size_t states_;
  std::size_t actions_;
  std::uint64_t count_;
};

/// Materialized enumeration; throws EnumerationCapError above cap.
std::vector<Policy> enumerate_policies(std::size_t states, std::size_t actions,
                                       std::uint64_t cap = kDefaultEnumerationCap);

/**
 * Column-stochastic n x n matrix: entry (i, j) is the probability of moving
 * from state j to state i, so distributions evolve as v_{t+1} = M v_t.
 */
class StochasticMatrix {
 public:
  /// Throws std::invalid_argument unless square, entries in [0,1] and every
  /// column sums to 1 within tol.
  explicit StochasticMatrix(Eigen::MatrixXd m, double tol = kRowSumTolerance);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double min_coeff() const { return m_.minCoeff(); }

  /// Entry-for-entry exact comparison.
  friend bool operator==(const StochasticMatrix& a, const StochasticMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() &&
           (a.m_.array() == b.m_.array()).all();
  }

 private:
  Eigen::MatrixXd m_;
};

/// M(i, j) = env(j, policy[j], i). Throws DimensionError on shape mismatch.
StochasticMatrix induced_transition_matrix(const Environment& env, const Policy& policy);

}  // namespace cmplab
