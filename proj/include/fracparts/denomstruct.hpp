#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracparts/diophantine.hpp"

namespace fracparts {

struct DenominatorCluster {
  std::vector<mpz_class> q0;
  std::vector<RelationTriple> members;
  mpz_class q_merged;  // prod_j q0[j]
};

/// Greedy per-slot majority filter, slots ascending, ties to the smaller q_j.
DenominatorCluster cluster_by_denominator(const std::vector<RelationTriple>& relations);

using Edge = std::pair<std::size_t, std::size_t>;

/// Index pairs i < j with gcd(B[i], B[j]) >= threshold.
std::vector<Edge> gcd_graph(const std::vector<mpz_class>& b, const mpz_class& threshold);

struct DivisorFilterResult {
  mpz_class d0;
  std::vector<mpz_class> filtered;
  std::vector<mpz_class> trace;
};

/// Repeatedly divides out the smallest l > 1 dividing at least #B / l^(delta/10)
/// of the current elements (discarding the others).
DivisorFilterResult dominant_divisor_filter(const std::vector<mpz_class>& b, const Real& delta);

/// Number of distinct sums over unordered r-multisets of the given values.
std::int64_t rfold_sum_count(const std::vector<mpq_class>& values, int r, std::int64_t enum_cap = 10'000'000);

/// Same on a_slot/q_slot of each relation; slot is 1-based.
std::int64_t rfold_sum_count(const std::vector<RelationTriple>& relations, int r, int slot,
                             std::int64_t enum_cap = 10'000'000);

}  // namespace fracparts
