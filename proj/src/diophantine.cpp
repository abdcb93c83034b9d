#include "fracparts/diophantine.hpp"

#include <algorithm>
#include <cmath>

namespace fracparts {

namespace {

mpq_class absq(const mpq_class& v) { return sgn(v) < 0 ? mpq_class(-v) : v; }

// Better means strictly closer, or equally close with smaller q.
bool better(const mpq_class& alpha, const mpz_class& a1, const mpz_class& q1, const mpz_class& a2,
            const mpz_class& q2) {
  mpq_class d1 = absq(alpha - mpq_class(a1, q1)), d2 = absq(alpha - mpq_class(a2, q2));
  if (d1 != d2) return d1 < d2;
  return q1 < q2;
}

}  // namespace

BestRational best_rational(const Real& alpha, const mpz_class& Q) {
  if (Q < 1) throw PreconditionError("best_rational needs Q >= 1");
  const mpq_class x = alpha.mid();
  mpz_class p_prev = 1, q_prev = 0;
  mpz_class a0 = floor_of(x);
  mpz_class p = a0, q = 1;
  mpq_class rem = x - mpq_class(a0);
  while (sgn(rem) != 0) {
    mpq_class inv = 1 / rem;
    mpz_class ak = floor_of(inv);
    rem = inv - mpq_class(ak);
    mpz_class q_next = ak * q + q_prev;
    if (q_next > Q) {
      mpz_class t = (Q - q_prev) / q;  // largest admissible intermediate fraction
      if (t >= 1) {
        mpz_class sp = t * p + p_prev, sq = t * q + q_prev;
        if (better(x, sp, sq, p, q)) return {sp, sq};
      }
      return {p, q};
    }
    mpz_class p_next = ak * p + p_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return {p, q};
}

long default_q_rel(const Epsilons& eps, const Real& c_cfg) {
  long double ld = std::log(eps.delta_product().to_long_double());
  long double v = std::exp(-ld * c_cfg.to_long_double());
  if (!(v < 1e6L)) return 1000000;
  return std::max(1L, static_cast<long>(std::ceil(v)));
}

std::vector<Real> slot_sums(const PolySystem& system, const FrequencyVector& h) {
  if (h.size() != system.k()) throw ShapeMismatch("frequency vector length differs from k");
  std::vector<Real> out;
  for (int j = 1; j <= system.d; ++j) {
    Real s(0);
    for (std::size_t i = 0; i < system.k(); ++i)
      if (h[i] != 0) s += Real(h[i]) * system.coeff(i, j);
    out.push_back(s);
  }
  return out;
}

std::vector<RelationTriple> build_relations(const PolySystem& system, const Real& x, const FourierDichotomy& dich,
                                            const RelationParams& params) {
  if (dich.branch != Branch::LargeCoefficients) throw PreconditionError("build_relations needs the frequency branch");
  if (params.q_rel < 1) throw PreconditionError("Q_rel must be positive");
  const mpz_class Q(params.q_rel);
  const long double log_tol = std::log(params.tol_rel.to_long_double()) +
                              params.c_cfg.to_long_double() * std::log(static_cast<long double>(params.q_rel));
  const long double log_x = std::log(x.to_long_double());
  std::vector<RelationTriple> out;
  for (const auto& w : dich.witnesses) {
    RelationTriple t;
    t.h = w.h;
    bool keep = true;
    auto sums = slot_sums(system, w.h);
    for (int j = 1; j <= system.d && keep; ++j) {
      const Real& s = sums[static_cast<std::size_t>(j - 1)];
      auto br = best_rational(s, Q);
      Real res = (s - Real(mpq_class(br.a, br.q))).abs();
      long double r = res.upper().get_d();
      if (r > 0 && std::log(static_cast<long double>(r)) > log_tol - j * log_x) keep = false;
      t.a.push_back(br.a);
      t.q.push_back(br.q);
      t.residuals.push_back(res);
    }
    if (keep) out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](const RelationTriple& a, const RelationTriple& b) { return a.h < b.h; });
  return out;
}

std::vector<Real> relation_residual(const RelationTriple& t, const PolySystem& system) {
  if (t.h.size() != system.k() || t.a.size() != static_cast<std::size_t>(system.d) || t.q.size() != t.a.size())
    throw ShapeMismatch("relation triple does not fit the system");
  auto sums = slot_sums(system, t.h);
  std::vector<Real> out;
  for (std::size_t j = 0; j < sums.size(); ++j) out.push_back((sums[j] - Real(mpq_class(t.a[j], t.q[j]))).abs());
  return out;
}

}  // namespace fracparts
