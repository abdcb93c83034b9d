#pragma once

#include <vector>

#include "fracparts/expsum.hpp"

namespace fracparts {

struct BestRational {
  mpz_class a;
  mpz_class q;
};

/// Closest a/q (lowest terms, 1 <= q <= Q) to the midpoint of alpha, ties to
/// the smaller q. Convergents and intermediate fractions only.
BestRational best_rational(const Real& alpha, const mpz_class& Q);

/// sum_i h_i f_{i,j} ~ a_j / q_j for each slot j.
struct RelationTriple {
  std::vector<mpz_class> a;
  std::vector<mpz_class> q;
  FrequencyVector h;
  std::vector<Real> residuals;
};

struct RelationParams {
  long q_rel = 0;      // 0: derive from Delta
  Real tol_rel{1};
  Real c_cfg{4};
};

/// ceil(Delta^(-C)) capped at 10^6.
long default_q_rel(const Epsilons& eps, const Real& c_cfg);

/// sigma_j = sum_i h_i f_{i,j} for j = 1..d.
std::vector<Real> slot_sums(const PolySystem& system, const FrequencyVector& h);

/// One triple per witness that passes residual_j <= tol_rel Q^C / x^j for
/// every j; sorted by h.
std::vector<RelationTriple> build_relations(const PolySystem& system, const Real& x, const FourierDichotomy& dich,
                                            const RelationParams& params);

/// Residuals recomputed from scratch.
std::vector<Real> relation_residual(const RelationTriple& t, const PolySystem& system);

}  // namespace fracparts
