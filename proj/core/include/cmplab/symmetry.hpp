#pragma once

#include "cmplab/environment.hpp"
#include "cmplab/policy.hpp"

namespace cmplab {

/// The two reference policies that define a swap. Both must cover the same states.
struct SwapPair {
  Policy pi_i;
  Policy pi_j;

  SwapPair(Policy i, Policy j);
};

/**
 * Environment swap map g_ij. At every state s where pi_i(s) != pi_j(s) the
 * rows (s, pi_i(s), .) and (s, pi_j(s), .) trade places; every other row is
 * copied. Entries are only permuted, so g_ij is an exact involution and the
 * result is a valid environment whenever the input is.
 */
Environment swap_environment(const Environment& env, const SwapPair& pair);

/// Policy map phi_ij: pi_i(s) -> pi_j(s), pi_j(s) -> pi_i(s), otherwise unchanged.
Policy swap_policy(const Policy& rho, const SwapPair& pair);

/// M_{phi(rho)}(env) == M_rho(g(env)), compared bit for bit.
bool verify_matrix_transport(const Environment& env, const SwapPair& pair, const Policy& rho);

}  // namespace cmplab
