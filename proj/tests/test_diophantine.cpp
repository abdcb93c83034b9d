#include <gtest/gtest.h>

#include <random>

#include "fracparts/diophantine.hpp"
#include "oracles.hpp"

using namespace fracparts;
using oracle::eps_of;
using oracle::system_of;

namespace {

// Exhaustive: for each q <= Q, the nearest a is floor or ceil of q*alpha.
std::pair<mpz_class, mpz_class> scan_best(const mpq_class& alpha, long Q) {
  mpz_class ba, bq;
  mpq_class bd = -1;
  for (long q = 1; q <= Q; ++q) {
    mpz_class f = floor_of(alpha * q);
    for (mpz_class a : {f, mpz_class(f + 1)}) {
      mpq_class dd = alpha - mpq_class(a, q);
      if (dd < 0) dd = -dd;
      if (bd < 0 || dd < bd) {
        bd = dd;
        ba = a;
        bq = q;
      }
    }
  }
  mpq_class r(ba, bq);
  r.canonicalize();
  return {r.get_num(), r.get_den()};
}

}  // namespace

TEST(BestRational, Examples) {
  auto r1 = best_rational(Real(mpq_class(1, 2)), 10);
  EXPECT_EQ(r1.a, 1);
  EXPECT_EQ(r1.q, 2);
  auto r2 = best_rational(Real(0), 5);
  EXPECT_EQ(r2.a, 0);
  EXPECT_EQ(r2.q, 1);
  // pi from MPFR at 192 bits
  mpfr_t pi;
  mpfr_init2(pi, 192);
  mpfr_const_pi(pi, MPFR_RNDN);
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), pi);
  mpfr_clear(pi);
  auto r3 = best_rational(Real(q), 10);
  EXPECT_EQ(r3.a, 22);
  EXPECT_EQ(r3.q, 7);
  auto want = scan_best(q, 10);
  EXPECT_EQ(r3.a, want.first);
  EXPECT_EQ(r3.q, want.second);
}

TEST(BestRational, OptimalAndDirichletOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    long Q = 1 + static_cast<long>(rng() % 500);
    mpq_class alpha(mpz_class(static_cast<unsigned long>(rng() >> 1)) - mpz_class(1UL << 62),
                    mpz_class(1 + static_cast<unsigned long>(rng() % 1000000007UL)));
    alpha.canonicalize();
    auto r = best_rational(Real(alpha), Q);
    auto want = scan_best(alpha, Q);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.a.get_mpz_t(), r.q.get_mpz_t());
    EXPECT_EQ(g, 1);
    EXPECT_LE(r.q, Q);
    mpq_class got = alpha - mpq_class(r.a, r.q), best = alpha - mpq_class(want.first, want.second);
    EXPECT_EQ(abs(got), abs(best));
    // The Dirichlet fraction (minimal |q alpha - a|) meets 1/(q(Q+1)); the
    // closest fraction is at least as close, though its own q may be larger.
    mpq_class dir_err = -1;
    long dir_q = 0;
    for (long q = 1; q <= Q; ++q) {
      mpq_class v = alpha * q;
      mpq_class e = v - mpq_class(round_of(v));
      e = abs(e);
      if (dir_err < 0 || e < dir_err) {
        dir_err = e;
        dir_q = q;
      }
    }
    EXPECT_LE(dir_err / dir_q, mpq_class(1) / (mpq_class(dir_q) * (Q + 1)));
    EXPECT_LE(abs(got), dir_err / dir_q);
  }
}

TEST(BuildRelations, ExactCancellation) {
  auto s = system_of(2, {{"0", "sqrt(2)"}, {"0", "sqrt(2)"}});
  FourierDichotomy dich;
  dich.branch = Branch::LargeCoefficients;
  dich.witnesses.push_back({{1, -1}, Real(200)});
  RelationParams p;
  p.q_rel = 1000;
  auto rel = build_relations(s, Real(200), dich, p);
  ASSERT_EQ(rel.size(), 1u);
  EXPECT_EQ(rel[0].a, (std::vector<mpz_class>{0, 0}));
  EXPECT_EQ(rel[0].q, (std::vector<mpz_class>{1, 1}));
  EXPECT_TRUE(rel[0].residuals[0].is_zero());
  EXPECT_LT(rel[0].residuals[1].upper(), mpq_class(1, 1000000));
  auto again = relation_residual(rel[0], s);
  EXPECT_TRUE(again[0].is_zero());
  EXPECT_EQ(again[1], rel[0].residuals[1]);
}

TEST(BuildRelations, RationalCoefficient) {
  auto s = system_of(1, {{"3/7"}});
  FourierDichotomy dich;
  dich.branch = Branch::LargeCoefficients;
  dich.witnesses.push_back({{1}, Real(1)});
  RelationParams p;
  p.q_rel = 10;
  auto rel = build_relations(s, Real(100), dich, p);
  ASSERT_EQ(rel.size(), 1u);
  EXPECT_EQ(rel[0].a[0], 3);
  EXPECT_EQ(rel[0].q[0], 7);
  EXPECT_TRUE(rel[0].residuals[0].is_zero());
  EXPECT_TRUE(relation_residual(rel[0], s)[0].is_zero());
  RelationTriple bad = rel[0];
  bad.h = {1, 2};
  EXPECT_THROW(relation_residual(bad, s), ShapeMismatch);
}

TEST(BuildRelations, RandomSystemAgainstExhaustiveScan) {
  auto s = system_of(2, {{"sqrt(2)/3", "0.37"}, {"sqrt(5)/7", "sqrt(3)/11"}});
  FourierDichotomy dich;
  dich.branch = Branch::LargeCoefficients;
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      if (a != 0 || b != 0) dich.witnesses.push_back({{a, b}, Real(1)});
  RelationParams p;
  p.q_rel = 60;
  p.c_cfg = Real(1);
  auto rel = build_relations(s, Real(50), dich, p);
  auto rel2 = build_relations(s, Real(50), dich, p);
  ASSERT_EQ(rel.size(), rel2.size());
  for (std::size_t i = 0; i < rel.size(); ++i) {
    EXPECT_EQ(rel[i].h, rel2[i].h);
    if (i > 0) {
      EXPECT_LT(rel[i - 1].h, rel[i].h);
    }
    auto sums = slot_sums(s, rel[i].h);
    auto rr = relation_residual(rel[i], s);
    for (std::size_t j = 0; j < 2; ++j) {
      auto want = scan_best(sums[j].mid(), 60);
      EXPECT_EQ(rel[i].a[j], want.first);
      EXPECT_EQ(rel[i].q[j], want.second);
      EXPECT_EQ(rr[j], rel[i].residuals[j]);
      // tolerance 60 / 50^j
      EXPECT_LE(rel[i].residuals[j].mid().get_d(), 60.0 / std::pow(50.0, static_cast<double>(j + 1)));
    }
  }
}

TEST(BuildRelations, ScalingCoherence) {
  // Common denominator 12; Q_rel large enough gives exact relations.
  auto s = system_of(2, {{"1/3", "5/4"}, {"-7/6", "1/12"}});
  FourierDichotomy dich;
  dich.branch = Branch::LargeCoefficients;
  for (long a = -2; a <= 2; ++a)
    for (long b = -2; b <= 2; ++b)
      if (a != 0 || b != 0) dich.witnesses.push_back({{a, b}, Real(1)});
  RelationParams p;
  p.q_rel = 12 * 2 * 2 * 7;
  auto rel = build_relations(s, Real(100), dich, p);
  EXPECT_EQ(rel.size(), dich.witnesses.size());
  for (const auto& t : rel)
    for (const auto& r : t.residuals) EXPECT_TRUE(r.is_zero());
}

TEST(DefaultQRel, CappedPower) {
  EXPECT_EQ(default_q_rel(eps_of({"0.5"}), Real(4)), 16);
  EXPECT_EQ(default_q_rel(eps_of({"0.01"}), Real(4)), 1000000);
}
