#include "cmplab/symmetry.hpp"

#include <algorithm>

#include "cmplab/errors.hpp"

namespace cmplab {

SwapPair::SwapPair(Policy i, Policy j) : pi_i(std::move(i)), pi_j(std::move(j)) {
  if (pi_i.states() != pi_j.states()) {
    throw DimensionError("swap pair policies cover different numbers of states");
  }
}

namespace {

void require_compatible(const Environment& env, const SwapPair& pair) {
  if (pair.pi_i.states() != env.states()) {
    throw DimensionError("swap pair covers " + std::to_string(pair.pi_i.states()) +
                         " states, environment has " + std::to_string(env.states()));
  }
  for (std::size_t s = 0; s < env.states(); ++s) {
    if (pair.pi_i[s] >= env.actions() || pair.pi_j[s] >= env.actions()) {
      throw DimensionError("swap pair action out of range in state " + std::to_string(s));
    }
  }
}

}  // namespace

Environment swap_environment(const Environment& env, const SwapPair& pair) {
  require_compatible(env, pair);
  const auto data = env.data();
  std::vector<double> p(data.begin(), data.end());
  const auto n = env.states();
  const auto m = env.actions();
  for (std::size_t s = 0; s < n; ++s) {
    const auto a = pair.pi_i[s];
    const auto b = pair.pi_j[s];
    if (a == b) continue;
    auto row_a = p.begin() + static_cast<std::ptrdiff_t>((s * m + a) * n);
    auto row_b = p.begin() + static_cast<std::ptrdiff_t>((s * m + b) * n);
    std::swap_ranges(row_a, row_a + static_cast<std::ptrdiff_t>(n), row_b);
  }
  return Environment(n, m, std::move(p));
}

Policy swap_policy(const Policy& rho, const SwapPair& pair) {
  if (rho.states() != pair.pi_i.states()) {
    throw DimensionError("policy and swap pair cover different numbers of states");
  }
  Policy out = rho;
  for (std::size_t s = 0; s < rho.states(); ++s) {
    if (rho[s] == pair.pi_i[s]) {
      out.actions[s] = pair.pi_j[s];
    } else if (rho[s] == pair.pi_j[s]) {
      out.actions[s] = pair.pi_i[s];
    }
  }
  return out;
}

bool verify_matrix_transport(const Environment& env, const SwapPair& pair, const Policy& rho) {
  return induced_transition_matrix(env, swap_policy(rho, pair)) ==
         induced_transition_matrix(swap_environment(env, pair), rho);
}

}  // namespace cmplab
