#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "fracparts/core.hpp"
#include "fracparts/matrix.hpp"

namespace fracparts {

using RatVector = std::vector<mpq_class>;

/// sqrt(det(G^T G)) for the given vectors as columns of G.
Real wedge_norm(const std::vector<RatVector>& vectors);

mpq_class inf_norm(const RatVector& v);
Real euclid_norm(const RatVector& v);

struct LatticeBasis {
  RatMatrix vectors;  // one basis vector per row
  bool reduced = false;
  std::vector<mpq_class> minima;  // inf norms, nondecreasing (reduced bases)
  IntMatrix transform;            // reduced rows = transform * original rows
  mpq_class rounding_radius = 0;  // largest coefficient radius that was dropped
};

/// Rows (1/B_i) e_i - sum_j (beta_ij / eta^j) e_{k+j} for i <= k, then
/// (1/eta^j) e_{k+j}. beta is the coefficient table of `beta`.
LatticeBasis build_relation_lattice(const PolySystem& beta, const std::vector<mpq_class>& B, const mpq_class& eta);

/// Exact LLL (delta 99/100) followed by a stable sort on the inf norm.
LatticeBasis reduce_basis(const LatticeBasis& basis);

/// Calls `visit(coeffs, vector)` for every lattice point with inf norm <= radius
/// (zero included). Fincke-Pohst enumeration; dimension at most 8.
void enumerate_inf_ball(const RatMatrix& rows, const mpq_class& radius,
                        const std::function<void(const std::vector<mpz_class>&, const RatVector&)>& visit,
                        std::int64_t node_cap = 50'000'000);

/// Number of lattice points with inf norm <= radius, zero included.
std::int64_t count_points_inf(const LatticeBasis& basis, const mpq_class& radius,
                              std::int64_t node_cap = 50'000'000);

/// Exact minimum of the inf norm over nonzero lattice vectors.
mpq_class shortest_inf_norm(const LatticeBasis& basis, std::int64_t node_cap = 50'000'000);

struct GeneratorSet {
  std::size_t r = 0;
  std::vector<std::vector<long>> h_vecs;
  std::vector<std::vector<mpz_class>> a_vecs;
  std::vector<mpq_class> B;
  mpq_class eta;
  std::vector<RatVector> h_tilde;  // h_i / B_i
  mpq_class tilde_product;         // prod_j |h~^(j)|_inf
  Real orth_ratio;                 // wedge / prod_j |h~^(j)|_2
  Real minor_ratio;                // largest r x r minor / wedge
  std::size_t J = 0;               // reduced vectors with inf norm <= 1
  std::vector<std::size_t> chosen;  // indices into the reduced basis
  int slack_level = 0;             // smallest s in {1, 2, ...} with product <= s N^(-1/(d+1))
};

struct NoShortVector {
  std::string reason;
};

struct GeneratorParams {
  std::int64_t n_target = 2;
  Real c_orth{mpq_class(1, 4)};
  Real c_slack{0};       // 0: 2^(k+d)
  std::size_t max_rank = 0;  // 0: k
};

std::variant<GeneratorSet, NoShortVector> quasi_orthogonal_generators(const PolySystem& beta,
                                                                      const std::vector<mpq_class>& B,
                                                                      const mpq_class& eta,
                                                                      const GeneratorParams& params);

/// Exact membership of (h, a) in the region |h_i| <= B_i,
/// |sum_i h_i beta_ij - a_j| <= eta^j; false unless decisive.
bool in_region(const PolySystem& beta, const std::vector<mpq_class>& B, const mpq_class& eta,
               const std::vector<long>& h, const std::vector<mpz_class>& a);

struct SublatticeReport {
  mpz_class det1;
  mpz_class det2;
  mpz_class det3;
  bool identity_holds = false;
  IntMatrix triangular;  // [H1 | H2] U = [T | 0]
  IntMatrix transform;   // U
  IntMatrix kernel;      // Z: columns span the solution lattice
};

SublatticeReport sublattice_determinants(const IntMatrix& H1, const IntMatrix& H2);

}  // namespace fracparts
