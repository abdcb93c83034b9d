#pragma once

#include <string>
#include <vector>

#include "fracparts/latgeom.hpp"

namespace fracparts {

struct ReductionStep {
  std::size_t k = 0;
  std::size_t r = 0;
  std::size_t k_prime = 0;
  std::vector<std::size_t> perm;  // slot t holds original polynomial perm[t]
  mpz_class q0;
  mpz_class D1;
  mpz_class D2;
  IntMatrix H;  // r x k, columns permuted
  std::vector<std::vector<mpz_class>> a_vecs;
  IntMatrix Z;  // k' x k', columns an LLL basis of the solution lattice
  std::vector<std::vector<mpz_class>> b_prime;  // k x d, permuted order
  PolySystem g;
  Epsilons eps_prime;
  Real y;
  Real delta_const;
  Real c_cfg;
  std::vector<mpq_class> B_lat;  // permuted
  mpq_class eta;
  mpq_class min_h_tilde;
  mpq_class tilde_product;
  std::string parent_digest;

  std::size_t original_index(std::size_t slot) const { return perm[slot]; }
};

/// Default small constant 1/(16 (k+d)^2).
Real default_delta_const(std::size_t k, int d);

/// Builds the reduced system from generators whose relations hold for
/// beta = q0 * f. Uses H1 b'_up + H2 b'_low = D2^j q0^(j-1) a_j.
ReductionStep reduce_dimension(const SystemState& state, const GeneratorSet& gens, const mpz_class& q0,
                               const Real& c_cfg, const Real& delta_const);

/// g = Z^-1 (f~_{r+1}, ..., f~_k) with f~_t(X) = f_perm[t](D2 q0 X) - sum_j b'_tj X^j.
PolySystem build_reduced_system(const PolySystem& f, const std::vector<std::size_t>& perm, std::size_t r,
                                const std::vector<std::vector<mpz_class>>& b_prime, const IntMatrix& Z,
                                const mpz_class& D2, const mpz_class& q0);
/// eps'_i = delta^2 eps_perm[r+i] / |z_i|_inf.
Epsilons build_reduced_eps(const Epsilons& eps, const std::vector<std::size_t>& perm, std::size_t r,
                           const IntMatrix& Z, const Real& delta_const);
/// y = delta x min|h~|_inf / (q0^(C+1) D2).
Real build_reduced_horizon(const Real& x, const Real& delta_const, const mpq_class& min_h_tilde, const mpz_class& q0,
                           const Real& c_cfg, const mpz_class& D2);

struct LiftResult {
  std::int64_t n = 0;
  std::vector<Real> dists;
};

/// n = n' q0 D2, re-verified against the parent targets.
LiftResult lift_solution(const ReductionStep& step, std::int64_t n_prime, const SystemState& parent);

struct DensityReport {
  long double E = 0;        // exponent on the parent side
  long double E_prime = 0;  // exponent on the child side
  long double log_lhs = 0;
  long double log_rhs = 0;
  long double log_ratio = 0;
  long double ratio = 0;   // lhs / rhs (may be inf when it overflows)
  long double log_c_impl = 0;
  long double c_impl = 0;
  bool pass = false;
};

/// lhs = y / (prod B')^E', rhs = x / (prod B)^E with B = 1/eps; passes when
/// lhs >= rhs / C_impl.
DensityReport density_invariant(const SystemState& parent, const ReductionStep& step, const Real& c_cfg);

}  // namespace fracparts
