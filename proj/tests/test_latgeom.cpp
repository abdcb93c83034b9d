#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fracparts/latgeom.hpp"
#include "oracles.hpp"

using namespace fracparts;
using oracle::system_of;

namespace {

RatVector rv(std::initializer_list<long> xs) {
  RatVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

IntMatrix random_int(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> u(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < c; ++b) m(a, b) = u(rng);
  return m;
}

// Product of elementary row operations: unimodular by construction.
IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
  IntMatrix u = IntMatrix::identity(n);
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  for (int step = 0; step < 12; ++step) {
    std::size_t a = idx(rng), b = idx(rng);
    if (a == b) continue;
    long q = coef(rng);
    for (std::size_t c = 0; c < n; ++c) u(a, c) += q * u(b, c);
  }
  return u;
}

mpq_class gram_det(const RatMatrix& rows) {
  return determinant(rows * rows.transpose());
}

// Lattice points of the region |h| <= B_i, |sum h beta - a| <= eta^j by
// direct enumeration over h (rational systems only).
std::vector<std::pair<std::vector<long>, std::vector<mpz_class>>> region_points(const PolySystem& s,
                                                                                const std::vector<long>& B,
                                                                                const mpq_class& eta) {
  std::vector<std::pair<std::vector<long>, std::vector<mpz_class>>> out;
  std::vector<long> h(s.k(), 0);
  for (std::size_t i = 0; i < s.k(); ++i) h[i] = -B[i];
  while (true) {
    std::vector<mpz_class> a;
    bool ok = true;
    mpq_class e = 1;
    for (int j = 1; j <= s.d && ok; ++j) {
      e *= eta;
      mpq_class v = 0;
      for (std::size_t i = 0; i < s.k(); ++i) v += s.coeff(i, j).mid() * h[i];
      mpz_class nearest = round_of(v);
      mpq_class diff = v - nearest;
      if (diff < 0) diff = -diff;
      ok = diff <= e;
      a.push_back(nearest);
    }
    if (ok) out.emplace_back(h, a);
    std::size_t i = 0;
    while (i < s.k() && h[i] == B[i]) {
      h[i] = -B[i];
      ++i;
    }
    if (i == s.k()) break;
    ++h[i];
  }
  return out;
}

}  // namespace

TEST(WedgeNorm, Examples) {
  EXPECT_EQ(wedge_norm({rv({1, 0}), rv({0, 1})}), Real(1));
  EXPECT_EQ(wedge_norm({rv({3, 0}), rv({0, 4})}), Real(12));
  EXPECT_TRUE(wedge_norm({rv({1, 2}), rv({2, 4})}).is_zero());
  EXPECT_THROW(wedge_norm({rv({1}), rv({2})}), PreconditionError);
}

TEST(WedgeNorm, HadamardBound) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    std::size_t k = 1 + rng() % 4, r = 1 + rng() % k;
    IntMatrix m = random_int(rng, r, k, -6, 6);
    std::vector<RatVector> v(r);
    mpq_class prod_sq = 1;
    for (std::size_t a = 0; a < r; ++a) {
      mpq_class n2 = 0;
      for (std::size_t b = 0; b < k; ++b) {
        v[a].emplace_back(m(a, b));
        n2 += m(a, b) * m(a, b);
      }
      prod_sq *= n2;
    }
    // squared form: det(G^T G) <= prod |v|^2, exactly
    RatMatrix g(r, k);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < k; ++b) g(a, b) = v[a][b];
    EXPECT_LE(gram_det(g), prod_sq);
    EXPECT_TRUE(wedge_norm(v).lower() <= Real::exact(prod_sq).sqrt().upper());
  }
}

TEST(RelationLattice, HalfExample) {
  auto s = system_of(1, {{"1/2"}});
  auto lat = build_relation_lattice(s, {mpq_class(2)}, mpq_class(1, 4));
  EXPECT_EQ(lat.vectors, (RatMatrix{{mpq_class(1, 2), mpq_class(-2)}, {mpq_class(0), mpq_class(4)}}));
  EXPECT_EQ(lat.rounding_radius, 0);
}

TEST(RelationLattice, FormulaEntriesDegreeTwo) {
  auto s = system_of(2, {{"1/3", "5/7"}});
  mpq_class eta(1, 100);
  auto lat = build_relation_lattice(s, {mpq_class(10)}, eta);
  EXPECT_EQ(lat.vectors(0, 0), mpq_class(1, 10));
  EXPECT_EQ(lat.vectors(0, 1), -mpq_class(1, 3) / eta);
  EXPECT_EQ(lat.vectors(0, 2), -mpq_class(5, 7) / (eta * eta));
  EXPECT_EQ(lat.vectors(1, 1), 1 / eta);
  EXPECT_EQ(lat.vectors(2, 2), 1 / (eta * eta));
  EXPECT_EQ(lat.vectors(1, 0), 0);
}

TEST(RelationLattice, UnimodularKeepsGramDeterminant) {
  std::mt19937_64 rng(17);
  auto s = system_of(2, {{"0.3183", "-1/9"}, {"2/11", "0.75"}});
  auto lat = build_relation_lattice(s, {mpq_class(5), mpq_class(7)}, mpq_class(1, 128));
  mpq_class g0 = gram_det(lat.vectors);
  for (int t = 0; t < 10; ++t) {
    IntMatrix u = random_unimodular(rng, 4);
    EXPECT_EQ(gram_det(to_rational(u) * lat.vectors), g0);
  }
}

TEST(RelationLattice, PrecisionGuard) {
  auto s = system_of(1, {{"sqrt(2)"}});
  EXPECT_NO_THROW(build_relation_lattice(s, {mpq_class(4)}, mpq_class(1, 100)));
  PolySystem coarse;
  coarse.d = 1;
  coarse.polys.push_back(Poly{{Real::ball(mpq_class(7, 5), mpq_class(1, 1000), 10)}});
  EXPECT_THROW(build_relation_lattice(coarse, {mpq_class(4)}, mpq_class(1, 100)), PrecisionError);
}

TEST(ReduceBasis, OrthogonalInput) {
  LatticeBasis b;
  b.vectors = RatMatrix{{mpq_class(0), mpq_class(3)}, {mpq_class(2), mpq_class(0)}};
  auto red = reduce_basis(b);
  EXPECT_TRUE(red.reduced);
  EXPECT_EQ(red.minima, (std::vector<mpq_class>{2, 3}));
  std::set<std::pair<long, long>> rows;
  for (std::size_t r = 0; r < 2; ++r) {
    long x = std::abs(red.vectors(r, 0).get_num().get_si()), y = std::abs(red.vectors(r, 1).get_num().get_si());
    rows.insert({x, y});
  }
  EXPECT_EQ(rows, (std::set<std::pair<long, long>>{{2, 0}, {0, 3}}));
}

TEST(ReduceBasis, SkewTwoDimensional) {
  LatticeBasis b;
  b.vectors = RatMatrix{{mpq_class(1), mpq_class(0)}, {mpq_class(1000000), mpq_class(1)}};
  auto red = reduce_basis(b);
  EXPECT_EQ(red.minima, (std::vector<mpq_class>{1, 1}));
  std::set<std::pair<long, long>> rows;
  for (std::size_t r = 0; r < 2; ++r) {
    long x = std::abs(red.vectors(r, 0).get_num().get_si()), y = std::abs(red.vectors(r, 1).get_num().get_si());
    rows.insert({x, y});
  }
  EXPECT_EQ(rows, (std::set<std::pair<long, long>>{{1, 0}, {0, 1}}));
}

TEST(ReduceBasis, RandomFiveDimensional) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    IntMatrix m = random_int(rng, 5, 5, -50, 50);
    if (determinant(m) == 0) continue;
    LatticeBasis b;
    b.vectors = to_rational(m);
    auto red = reduce_basis(b);
    EXPECT_EQ(abs(determinant(red.vectors)), abs(determinant(b.vectors)));
    EXPECT_EQ(abs(determinant(red.transform)), 1);
    EXPECT_EQ(to_rational(red.transform) * b.vectors, red.vectors);
    // Hadamard ratio det / prod |b_i|_2 does not drop (squared, exact)
    auto prod_sq = [](const RatMatrix& v) {
      mpq_class p = 1;
      for (std::size_t r = 0; r < v.rows(); ++r) {
        mpq_class s = 0;
        for (std::size_t c = 0; c < v.cols(); ++c) s += v(r, c) * v(r, c);
        p *= s;
      }
      return p;
    };
    EXPECT_LE(prod_sq(red.vectors), prod_sq(b.vectors));
    for (std::size_t i = 1; i < red.minima.size(); ++i) EXPECT_LE(red.minima[i - 1], red.minima[i]);
  }
}

TEST(ReduceBasis, DependentRowsThrow) {
  LatticeBasis b;
  b.vectors = RatMatrix{{mpq_class(1), mpq_class(2)}, {mpq_class(2), mpq_class(4)}};
  EXPECT_THROW(reduce_basis(b), SingularMatrix);
}

TEST(Enumeration, ShortestMatchesBruteForce) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 15; ++t) {
    IntMatrix m = random_int(rng, 3, 3, -9, 9);
    if (determinant(m) == 0) continue;
    LatticeBasis b;
    b.vectors = to_rational(m);
    auto red = reduce_basis(b);
    // oracle: coefficient box large enough for these small lattices
    mpq_class best = -1;
    std::int64_t within3 = 0;
    for (long x = -30; x <= 30; ++x)
      for (long y = -30; y <= 30; ++y)
        for (long z = -30; z <= 30; ++z) {
          mpq_class n = 0;
          for (std::size_t c = 0; c < 3; ++c) {
            mpq_class v = m(0, c) * x + m(1, c) * y + m(2, c) * z;
            if (abs(v) > n) n = abs(v);
          }
          if (n <= 3) ++within3;
          if ((x || y || z) && (best < 0 || n < best)) best = n;
        }
    EXPECT_EQ(shortest_inf_norm(red), best);
    EXPECT_EQ(count_points_inf(red, mpq_class(3)), within3);
  }
}

TEST(Generators, HalfExample) {
  auto s = system_of(1, {{"1/2"}});
  GeneratorParams p;
  p.n_target = 2;
  auto out = quasi_orthogonal_generators(s, {mpq_class(2)}, mpq_class(1, 10), p);
  ASSERT_TRUE(std::holds_alternative<GeneratorSet>(out));
  const auto& g = std::get<GeneratorSet>(out);
  EXPECT_EQ(g.r, 1u);
  EXPECT_EQ(g.h_vecs[0], std::vector<long>{2});
  EXPECT_EQ(g.a_vecs[0], std::vector<mpz_class>{1});
  EXPECT_EQ(g.tilde_product, 1);
  // oracle: the only nonzero region points with h >= 0 are (2, 1)
  std::set<long> hs;
  for (const auto& pt : region_points(s, {2}, mpq_class(1, 10)))
    if (pt.first[0] > 0) hs.insert(pt.first[0]);
  EXPECT_EQ(hs, std::set<long>{2});
}

TEST(Generators, ExactCancellation) {
  auto s = system_of(2, {{"0", "sqrt(2)"}, {"0", "sqrt(2)"}});
  GeneratorParams p;
  auto out = quasi_orthogonal_generators(s, {mpq_class(4), mpq_class(4)}, mpq_class(1, 1000), p);
  ASSERT_TRUE(std::holds_alternative<GeneratorSet>(out));
  const auto& g = std::get<GeneratorSet>(out);
  ASSERT_EQ(g.r, 1u);
  EXPECT_EQ(g.h_vecs[0][0], -g.h_vecs[0][1]);
  EXPECT_GT(g.h_vecs[0][0], 0);
  EXPECT_EQ(g.a_vecs[0], (std::vector<mpz_class>{0, 0}));
}

TEST(Generators, NoShortVector) {
  auto s = system_of(1, {{"sqrt(2)"}});
  GeneratorParams p;
  auto out = quasi_orthogonal_generators(s, {mpq_class(1)}, mpq_class(1, 100), p);
  EXPECT_TRUE(std::holds_alternative<NoShortVector>(out));
}

TEST(Generators, RandomRationalMembershipAndRatios) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> num(-40, 40), den(1, 12);
  int emitted = 0;
  for (int t = 0; t < 60; ++t) {
    std::size_t k = 1 + rng() % 3;
    int d = 1 + static_cast<int>(rng() % 2);
    PolySystem s;
    s.d = d;
    for (std::size_t i = 0; i < k; ++i) {
      Poly p;
      for (int j = 0; j < d; ++j) p.coeffs.push_back(Real(mpq_class(num(rng), den(rng))));
      s.polys.push_back(p);
    }
    std::vector<mpq_class> B;
    for (std::size_t i = 0; i < k; ++i) B.emplace_back(static_cast<long>(4 + rng() % 20));
    mpq_class eta(1, 200);
    GeneratorParams p;
    p.n_target = 4;
    auto out = quasi_orthogonal_generators(s, B, eta, p);
    if (!std::holds_alternative<GeneratorSet>(out)) continue;
    ++emitted;
    const auto& g = std::get<GeneratorSet>(out);
    for (std::size_t j = 0; j < g.r; ++j) {
      // independent residual recomputation
      mpq_class e = 1;
      for (int l = 1; l <= d; ++l) {
        e *= eta;
        mpq_class v = -mpq_class(g.a_vecs[j][static_cast<std::size_t>(l - 1)]);
        for (std::size_t i = 0; i < k; ++i) v += s.coeff(i, l).mid() * g.h_vecs[j][i];
        EXPECT_LE(abs(v), e);
      }
      for (std::size_t i = 0; i < k; ++i) EXPECT_LE(mpq_class(std::labs(g.h_vecs[j][i])), B[i]);
    }
    EXPECT_TRUE(p.c_orth.certainly_leq(g.orth_ratio));
    EXPECT_LE(g.orth_ratio.lower(), 1);
    EXPECT_TRUE(g.minor_ratio.upper() >= mpq_class(1, 4));
    EXPECT_TRUE(g.minor_ratio.lower() <= 1);
  }
  EXPECT_GT(emitted, 10);
}

TEST(Sublattice, Examples) {
  auto a = sublattice_determinants(IntMatrix{{mpz_class(2)}}, IntMatrix{{mpz_class(1)}});
  EXPECT_EQ(a.det1, 2);
  EXPECT_EQ(a.det2, 1);
  EXPECT_EQ(a.det3, 2);
  EXPECT_TRUE(a.identity_holds);
  auto b = sublattice_determinants(IntMatrix{{mpz_class(2)}}, IntMatrix{{mpz_class(0)}});
  EXPECT_EQ(b.det1, 2);
  EXPECT_EQ(b.det2, 2);
  EXPECT_EQ(b.det3, 1);
  std::mt19937_64 rng(3);
  auto c = sublattice_determinants(IntMatrix::identity(3), random_int(rng, 3, 2, -5, 5));
  EXPECT_EQ(c.det1, 1);
  EXPECT_EQ(c.det2, 1);
  EXPECT_EQ(c.det3, 1);
  EXPECT_THROW(sublattice_determinants(IntMatrix{{mpz_class(0)}}, IntMatrix{{mpz_class(1)}}), SingularMatrix);
}

namespace {

// Residues of the span of `gens` (columns) in (Z/D)^r, by closure.
std::int64_t residue_count(const std::vector<std::vector<long>>& gens, std::size_t r, long D) {
  std::int64_t total = 1;
  for (std::size_t i = 0; i < r; ++i) total *= D;
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  auto encode = [&](const std::vector<long>& v) {
    std::int64_t c = 0;
    for (std::size_t i = r; i-- > 0;) c = c * D + v[i];
    return c;
  };
  std::vector<std::vector<long>> stack{std::vector<long>(r, 0)};
  seen[0] = 1;
  std::int64_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (const auto& g : gens) {
      std::vector<long> w(r);
      for (std::size_t i = 0; i < r; ++i) w[i] = ((v[i] + g[i]) % D + D) % D;
      auto code = encode(w);
      if (!seen[static_cast<std::size_t>(code)]) {
        seen[static_cast<std::size_t>(code)] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

}  // namespace

TEST(Sublattice, RandomIdentityWithResidueOracle) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t r = 1 + rng() % 4, l = 1 + rng() % 4;
    IntMatrix H1 = random_int(rng, r, r, -5, 5), H2 = random_int(rng, r, l, -5, 5);
    mpz_class D = abs(determinant(H1));
    if (D == 0) {
      EXPECT_THROW(sublattice_determinants(H1, H2), SingularMatrix);
      continue;
    }
    auto rep = sublattice_determinants(H1, H2);
    EXPECT_TRUE(rep.identity_holds);
    EXPECT_EQ(rep.det1, D);
    EXPECT_EQ(rep.det1, rep.det2 * rep.det3);

    long Dl = D.get_si();
    double states2 = std::pow(static_cast<double>(Dl), static_cast<double>(r));
    double states3 = std::pow(static_cast<double>(Dl), static_cast<double>(l));
    if (states2 > 2e5 || states3 > 2e5) continue;
    ++checked;
    // det(L2) = D^r / #residues of L2 mod D
    std::vector<std::vector<long>> gens;
    for (std::size_t c = 0; c < r; ++c) gens.push_back([&] {
        std::vector<long> g(r);
        for (std::size_t i = 0; i < r; ++i) g[i] = H1(i, c).get_si();
        return g;
      }());
    for (std::size_t c = 0; c < l; ++c) gens.push_back([&] {
        std::vector<long> g(r);
        for (std::size_t i = 0; i < r; ++i) g[i] = H2(i, c).get_si();
        return g;
      }());
    auto res2 = residue_count(gens, r, Dl);
    EXPECT_EQ(mpz_class(static_cast<long>(states2)) / res2, rep.det2);
    // det(L3) = D^l / #{y in [0, D)^l : H1^-1 H2 y integral}
    RatMatrix inv = inverse(to_rational(H1));
    RatMatrix M = inv * to_rational(H2);
    std::int64_t good = 0;
    std::vector<long> y(l, 0);
    while (true) {
      bool integral = true;
      for (std::size_t i = 0; i < r && integral; ++i) {
        mpq_class v = 0;
        for (std::size_t j = 0; j < l; ++j) v += M(i, j) * y[j];
        integral = v.get_den() == 1;
      }
      if (integral) ++good;
      std::size_t i = 0;
      while (i < l && y[i] == Dl - 1) y[i++] = 0;
      if (i == l) break;
      ++y[i];
    }
    EXPECT_EQ(mpz_class(static_cast<long>(states3)) / good, rep.det3);
  }
  EXPECT_GT(checked, 100);
}
