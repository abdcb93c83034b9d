#include <gtest/gtest.h>

#include <random>

#include "fracparts/expsum.hpp"
#include "oracles.hpp"

using namespace fracparts;
using oracle::eps_of;
using oracle::system_of;

TEST(WeylSum, Examples) {
  auto s0 = weyl_sum(system_of(2, {{"sqrt(2)", "1/3"}}), {0}, Real(7));
  EXPECT_EQ(s0.re.mid(), 7);
  EXPECT_LT(s0.re.radius(), mpq_class(1, 1000000));
  EXPECT_NEAR(s0.im.to_double(), 0, 1e-40);
  auto s1 = weyl_sum(system_of(1, {{"1/2"}}), {1}, Real(2));
  EXPECT_NEAR(s1.re.to_double(), 0, 1e-40);
  EXPECT_NEAR(s1.im.to_double(), 0, 1e-40);
}

TEST(WeylSum, DoubledPrecisionAgrees) {
  // 192-bit input and sum versus a 384-bit recomputation.
  auto s192 = system_of(2, {{"0", "sqrt(2)"}});
  PolySystem s384;
  s384.d = 2;
  s384.polys.push_back({{Real(0), Real::parse("sqrt(2)", 384)}});
  auto a = weyl_sum(s192, {1}, Real(1000), 192);
  auto b = weyl_sum(s384, {1}, Real(1000), 384);
  mpq_class dr = a.re.mid() - b.re.mid(), di = a.im.mid() - b.im.mid();
  mpq_class diff2 = dr * dr + di * di;
  mpq_class mod2 = b.modulus_sq().mid();
  // relative 2^-100
  mpq_class bound(mpz_class(1), mpz_class(1) << 200);
  EXPECT_LE(diff2, bound * mod2);
  auto naive = oracle::weyl_naive(s192, {1}, 1000);
  EXPECT_NEAR(static_cast<double>(naive.real()), a.re.to_double(), 1e-9);
  EXPECT_NEAR(static_cast<double>(naive.imag()), a.im.to_double(), 1e-9);
}

TEST(WeylSum, FastAgreesWithPrecise) {
  auto s = system_of(3, {{"sqrt(3)/5", "-0.3", "sqrt(7)/13"}, {"0.125", "sqrt(2)", "0"}});
  for (FrequencyVector h : {FrequencyVector{1, 0}, {3, -2}, {-7, 5}, {0, 1}}) {
    auto p = weyl_sum(s, h, Real(3000));
    auto f = weyl_sum_fast(s, h, Real(3000));
    EXPECT_NEAR(f.real(), p.re.to_double(), 1e-9);
    EXPECT_NEAR(f.imag(), p.im.to_double(), 1e-9);
  }
}

TEST(WeylSum, RationalPhaseMatchesNaive) {
  auto s = system_of(3, {{"5/12", "-7/9", "1/4"}, {"1/6", "2/3", "0"}});
  for (FrequencyVector h : {FrequencyVector{1, 0}, {2, -1}, {3, 5}})
    for (long x : {1L, 35L, 36L, 1000L, 1037L}) {
      auto p = weyl_sum(s, h, Real(x));
      auto n = oracle::weyl_naive(s, h, x);
      EXPECT_NEAR(p.re.to_double(), static_cast<double>(n.real()), 1e-9);
      EXPECT_NEAR(p.im.to_double(), static_cast<double>(n.imag()), 1e-9);
    }
  // e(n^2/4) over one period: i, 1, i, 1
  auto q = weyl_sum(system_of(2, {{"0", "1/4"}}), {1}, Real(8));
  EXPECT_NEAR(q.re.to_double(), 4, 1e-30);
  EXPECT_NEAR(q.im.to_double(), 4, 1e-30);
}

TEST(WeylSum, ConjugateSymmetryAndTrivialBound) {
  auto s = system_of(2, {{"sqrt(5)/3", "sqrt(2)"}, {"1/7", "sqrt(3)"}});
  for (FrequencyVector h : {FrequencyVector{1, 2}, {-3, 1}, {4, 0}}) {
    FrequencyVector n = h;
    for (auto& v : n) v = -v;
    auto a = weyl_sum(s, h, Real(500));
    auto b = weyl_sum(s, n, Real(500));
    EXPECT_NEAR(a.re.to_double(), b.re.to_double(), 1e-30);
    EXPECT_NEAR(a.im.to_double(), -b.im.to_double(), 1e-30);
    EXPECT_LE(a.modulus(), 500.0L);
  }
}

TEST(Kernel, ShapeAndTransformAtZero) {
  EXPECT_EQ(phi(0), 1);
  EXPECT_EQ(phi(0.5L), 1);
  EXPECT_EQ(phi(1), 0);
  EXPECT_EQ(phi(-1.2L), 0);
  for (int i = 0; i <= 1000; ++i) {
    long double u = i / 1000.0L;
    EXPECT_GE(phi(u), 0);
    EXPECT_LE(phi(u), 1);
    EXPECT_EQ(phi(u), phi(-u));
  }
  // Second differences stay bounded across the knots: C^2 shape.
  const long double h = 1e-4L;
  for (long double u : {0.5L, 2.0L / 3, 5.0L / 6, 1.0L}) {
    long double left = (phi(u - 2 * h) - 2 * phi(u - h) + phi(u)) / (h * h);
    long double right = (phi(u) - 2 * phi(u + h) + phi(u + 2 * h)) / (h * h);
    EXPECT_NEAR(static_cast<double>(left), static_cast<double>(right), 0.1) << static_cast<double>(u);
  }
  EXPECT_NEAR(static_cast<double>(phi_hat(0)), 1.5, 1e-15);
}

TEST(Kernel, TransformMatchesDirectQuadrature) {
  for (long double xi : {0.3L, 1.0L, 2.5L, 7.0L}) {
    long double s = 0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
      long double u = -1 + (i + 0.5L) * 2 / m;
      s += phi(u) * std::cos(6.283185307179586476925L * u * xi);
    }
    s *= 2.0L / m;
    EXPECT_NEAR(static_cast<double>(phi_hat(xi)), static_cast<double>(s), 1e-8);
  }
}

TEST(SmoothedCount, Examples) {
  EXPECT_EQ(smoothed_count(system_of(1, {{"1/2"}}), eps_of({"0.3"}), Real(5)).value.mid(), 2);
  EXPECT_EQ(smoothed_count(system_of(1, {{"0"}}), eps_of({"0.1"}), Real(10)).value.mid(), 10);
  // n^2/4 is always within 1/4 of an integer: the whole range is plateau.
  EXPECT_EQ(smoothed_count(system_of(2, {{"0", "1/4"}}), eps_of({"1/2"}), Real(37)).value.mid(), 37);
}

TEST(SmoothedCount, SandwichOnRandomSystems) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
    std::vector<std::vector<std::string>> rows(k);
    std::vector<std::string> e, e2;
    for (std::size_t i = 0; i < k; ++i) {
      rows[i] = {std::to_string(static_cast<long>(u(rng) * 1e9)) + "/1000000007",
                 "sqrt(" + std::to_string(2 + trial + static_cast<int>(i)) + ")/3"};
      long num = 1 + static_cast<long>(u(rng) * 200);
      e.push_back(std::to_string(num) + "/1000");
      e2.push_back(std::to_string(num) + "/2000");
    }
    auto s = system_of(2, rows);
    auto sc = smoothed_count(s, eps_of(e), Real(3000));
    auto lo = hit_count(s, eps_of(e2), Real(3000));
    auto hi = hit_count(s, eps_of(e), Real(3000));
    EXPECT_LE(mpq_class(lo), sc.value.mid());
    EXPECT_LE(sc.value.mid(), mpq_class(hi));
  }
}

TEST(SmoothedCount, FourierRouteAgrees) {
  auto s = system_of(2, {{"0", "sqrt(2)"}});
  auto eps = eps_of({"0.1"});
  auto direct = smoothed_count(s, eps, Real(2000));
  long double f = smoothed_count_fourier(s, eps, Real(2000), SmoothingKernel{16});
  EXPECT_NEAR(static_cast<double>(f), direct.value.to_double(), 0.01 * direct.value.to_double());
}

TEST(HCaps, MatchFormula) {
  auto caps = h_caps(eps_of({"0.01"}));
  EXPECT_EQ(caps[0], static_cast<long>(std::floor(100 * std::pow(0.01, -1.0 / 16))));
  auto caps2 = h_caps(eps_of({"0.05", "0.05"}));
  EXPECT_EQ(caps2[0], static_cast<long>(std::floor(20 * std::pow(0.0025, -1.0 / 256))));
}

TEST(LargeCoefficients, ZeroSystemIsDense) {
  auto r = large_coefficients(system_of(2, {{"0", "0"}}), eps_of({"0.1"}), Real(100), Real::parse("0.1"));
  EXPECT_EQ(r.branch, Branch::HitDensity);
  EXPECT_EQ(r.density_count, 100);
}

TEST(LargeCoefficients, DuplicatePolynomialsGiveCancellingWitness) {
  auto s = system_of(2, {{"0", "sqrt(2)"}, {"0", "sqrt(2)"}});
  auto r = large_coefficients(s, eps_of({"0.05", "0.05"}), Real(200), Real(10000));
  ASSERT_EQ(r.branch, Branch::LargeCoefficients);
  EXPECT_EQ(r.Q, 2);
  bool found = false;
  for (const auto& w : r.witnesses) {
    if (w.h == FrequencyVector{1, -1}) {
      found = true;
      EXPECT_NEAR(w.sum_modulus.to_double(), 200.0, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(LargeCoefficients, RandomQuadraticAgainstExhaustiveComputation) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    std::string a = std::to_string(rng() % 1000000007) + "/1000000007";
    auto s = system_of(2, {{"0", a}});
    auto eps = eps_of({"0.01"});
    const long x = 500;
    long hits = oracle::hits_mpfr(s, {0.01}, x);
    auto r = large_coefficients(s, eps, Real(x), Real::parse("0.05"));
    EXPECT_EQ(r.density_count, hits);
    EXPECT_EQ(r.branch, hits >= 0.05 * 0.01 * x ? Branch::HitDensity : Branch::LargeCoefficients);

    // Force the frequency side and check the class choice against precise sums.
    auto f = large_coefficients(s, eps, Real(x), Real(1000000));
    ASSERT_EQ(f.branch, Branch::LargeCoefficients);
    std::map<int, int> counts;
    for (long h = -f.h_cap[0]; h <= f.h_cap[0]; ++h) {
      if (h == 0) continue;
      int j = dyadic_class(weyl_sum(s, {h}, Real(x)), Real(x));
      if (j > 0) ++counts[j];
    }
    int want = -1;
    for (auto [j, c] : counts)
      if (c >= std::ceil(std::sqrt(std::ldexp(1.0, j)) - 1e-12)) {
        want = j;
        break;
      }
    if (want > 0) {
      EXPECT_TRUE(f.threshold_met);
      EXPECT_EQ(f.Q, 1L << want);
      EXPECT_EQ(static_cast<int>(f.witnesses.size()), counts[want]);
    }
    for (const auto& w : f.witnesses) {
      int j = 0;
      while ((1L << j) < f.Q) ++j;
      EXPECT_TRUE(in_dyadic_window(weyl_sum(s, w.h, Real(x)), Real(x), j));
    }
  }
}

TEST(LargeCoefficients, CapsAndPreconditions) {
  auto s = system_of(1, {{"sqrt(2)"}, {"sqrt(3)"}, {"sqrt(5)"}});
  EXPECT_THROW(large_coefficients(s, eps_of({"0.001", "0.001", "0.001"}), Real(100), Real(100000), 1000),
               CapExceeded);
  EXPECT_THROW(large_coefficients(system_of(1, {{"sqrt(2)"}}), eps_of({"0.3"}), Real(100), Real(1)),
               PreconditionError);
}

TEST(WeylBound, Examples) {
  Poly sq{{Real(0), Real(1)}};
  auto r1 = verify_weyl_bound(sq, Real(mpq_class(1, 2)), 1, 2, Real(100), Real(2), 0.5L, 10);
  EXPECT_NEAR(static_cast<double>(r1.lhs), 0, 1e-20);
  EXPECT_TRUE(r1.pass);
  auto r2 = verify_weyl_bound(sq, Real(0), 0, 1, Real(100), Real(1), 0.5L, 1);
  EXPECT_NEAR(static_cast<double>(r2.lhs), 100, 1e-20);
  EXPECT_GE(r2.rhs, 100);
  EXPECT_TRUE(r2.pass);
  EXPECT_THROW(verify_weyl_bound(sq, Real(mpq_class(1, 3)), 2, 4, Real(100), Real(4), 0.5L, 1), PreconditionError);
}

TEST(WeylBound, RandomRationalsPassRate) {
  std::mt19937_64 rng(3);
  Poly sq{{Real(0), Real(1)}};
  int pass = 0;
  for (int t = 0; t < 100; ++t) {
    long q = 2 + static_cast<long>(rng() % 99), a;
    do a = static_cast<long>(rng() % static_cast<unsigned long>(q)); while (std::gcd(a, q) != 1);
    auto r = verify_weyl_bound(sq, Real(mpq_class(a, q)), a, q, Real(10000), Real(q), 0.5L, 10);
    // Gauss sums: |S| is about x / sqrt(q), far below 10 x / sqrt(q).
    if (r.pass) ++pass;
  }
  RecordProperty("pass_rate", pass);
  EXPECT_EQ(pass, 100);
}
