#include "fracparts/denomstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace fracparts {

DenominatorCluster cluster_by_denominator(const std::vector<RelationTriple>& relations) {
  if (relations.empty()) throw PreconditionError("cluster_by_denominator needs at least one relation");
  const std::size_t d = relations.front().q.size();
  std::vector<RelationTriple> cur = relations;
  DenominatorCluster out;
  out.q_merged = 1;
  for (std::size_t j = 0; j < d; ++j) {
    std::map<mpz_class, std::size_t> freq;
    for (const auto& t : cur) {
      if (t.q.size() != d) throw ShapeMismatch("relations have different slot counts");
      ++freq[t.q[j]];
    }
    mpz_class best;
    std::size_t best_count = 0;
    for (const auto& [q, c] : freq)  // ascending q, so ties keep the smaller one
      if (c > best_count) {
        best = q;
        best_count = c;
      }
    std::vector<RelationTriple> next;
    for (auto& t : cur)
      if (t.q[j] == best) next.push_back(std::move(t));
    cur = std::move(next);
    out.q0.push_back(best);
    out.q_merged *= best;
  }
  out.members = std::move(cur);
  return out;
}

std::vector<Edge> gcd_graph(const std::vector<mpz_class>& b, const mpz_class& threshold) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), b[i].get_mpz_t(), b[j].get_mpz_t());
      if (g >= threshold) edges.emplace_back(i, j);
    }
  return edges;
}

namespace {

std::vector<mpz_class> divisors(const mpz_class& v) {
  std::vector<mpz_class> small, large;
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  for (mpz_class i = 1; i <= r; ++i) {
    if (mpz_divisible_p(v.get_mpz_t(), i.get_mpz_t()) == 0) continue;
    small.push_back(i);
    mpz_class o = v / i;
    if (o != i) large.push_back(o);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace

DivisorFilterResult dominant_divisor_filter(const std::vector<mpz_class>& b, const Real& delta) {
  if (b.empty()) throw PreconditionError("dominant_divisor_filter needs a nonempty set");
  if (!delta.certainly_positive() || !delta.certainly_less(Real(mpq_class(1, 200))))
    throw PreconditionError("delta must lie in (0, 1/200)");
  for (const auto& v : b)
    if (v < 1) throw PreconditionError("elements must be positive integers");
  const long double expo = delta.to_long_double() / 10;
  DivisorFilterResult out;
  out.d0 = 1;
  std::vector<mpz_class> cur = b;
  while (true) {
    std::map<mpz_class, std::size_t> count;
    for (const auto& v : cur)
      for (const auto& dv : divisors(v))
        if (dv > 1) ++count[dv];
    const auto size = static_cast<long double>(cur.size());
    mpz_class chosen = 0;
    for (const auto& [l, c] : count) {  // ascending l
      long double need = size * std::pow(l.get_d(), -expo);
      if (static_cast<long double>(c) >= need) {
        chosen = l;
        break;
      }
    }
    if (chosen == 0) break;
    std::vector<mpz_class> next;
    for (const auto& v : cur)
      if (mpz_divisible_p(v.get_mpz_t(), chosen.get_mpz_t()) != 0) next.push_back(v / chosen);
    cur = std::move(next);
    out.d0 *= chosen;
    out.trace.push_back(chosen);
  }
  out.filtered = std::move(cur);
  return out;
}

std::int64_t rfold_sum_count(const std::vector<mpq_class>& values, int r, std::int64_t enum_cap) {
  if (r < 1) throw PreconditionError("r must be positive");
  if (values.empty()) return 0;
  const std::size_t m = values.size();
  // Number of multisets: C(m + r - 1, r).
  long double total = 1;
  for (int i = 1; i <= r; ++i) total = total * static_cast<long double>(m + static_cast<std::size_t>(i) - 1) / i;
  if (total > static_cast<long double>(enum_cap)) throw CapExceeded("r-fold multiset enumeration exceeds the cap");
  std::set<mpq_class> sums;
  std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
  while (true) {
    mpq_class s = 0;
    for (auto i : idx) s += values[i];
    sums.insert(s);
    // Next nondecreasing index tuple.
    int p = r - 1;
    while (p >= 0 && idx[static_cast<std::size_t>(p)] == m - 1) --p;
    if (p < 0) break;
    std::size_t v = idx[static_cast<std::size_t>(p)] + 1;
    for (int q = p; q < r; ++q) idx[static_cast<std::size_t>(q)] = v;
  }
  return static_cast<std::int64_t>(sums.size());
}

std::int64_t rfold_sum_count(const std::vector<RelationTriple>& relations, int r, int slot, std::int64_t enum_cap) {
  std::vector<mpq_class> values;
  for (const auto& t : relations) {
    if (slot < 1 || static_cast<std::size_t>(slot) > t.a.size()) throw ShapeMismatch("slot out of range");
    mpq_class v(t.a[static_cast<std::size_t>(slot - 1)], t.q[static_cast<std::size_t>(slot - 1)]);
    v.canonicalize();
    values.push_back(v);
  }
  return rfold_sum_count(values, r, enum_cap);
}

}  // namespace fracparts
