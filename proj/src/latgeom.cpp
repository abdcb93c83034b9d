#include "fracparts/latgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracparts {

namespace {

long double to_ld(const mpq_class& q) { return Real::exact(q).to_long_double(); }

mpq_class qpow(const mpq_class& b, int e) {
  mpq_class r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

RatMatrix gram(const std::vector<RatVector>& v) {
  RatMatrix g(v.size(), v.size());
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a; b < v.size(); ++b) {
      mpq_class s = 0;
      for (std::size_t c = 0; c < v[a].size(); ++c) s += v[a][c] * v[b][c];
      g(a, b) = s;
      g(b, a) = s;
    }
  return g;
}

// All size-r subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  if (r > n) return out;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

mpq_class max_minor(const std::vector<RatVector>& rows) {
  const std::size_t r = rows.size(), k = rows.front().size();
  mpq_class best = 0;
  for (const auto& cols : combinations(k, r)) {
    RatMatrix m(r, r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) m(a, b) = rows[a][cols[b]];
    mpq_class v = abs(determinant(m));
    if (v > best) best = v;
  }
  return best;
}

}  // namespace

Real wedge_norm(const std::vector<RatVector>& vectors) {
  if (vectors.empty()) return Real(1);
  const std::size_t k = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != k) throw ShapeMismatch("wedge_norm: vectors of different lengths");
  if (vectors.size() > k) throw PreconditionError("wedge_norm: more vectors than dimensions");
  mpq_class det = determinant(gram(vectors));
  if (det < 0) det = 0;
  return Real::exact(det).sqrt();
}

mpq_class inf_norm(const RatVector& v) {
  mpq_class m = 0;
  for (const auto& x : v)
    if (abs(x) > m) m = abs(x);
  return m;
}

Real euclid_norm(const RatVector& v) {
  mpq_class s = 0;
  for (const auto& x : v) s += x * x;
  return Real::exact(s).sqrt();
}

LatticeBasis build_relation_lattice(const PolySystem& beta, const std::vector<mpq_class>& B, const mpq_class& eta) {
  beta.validate();
  const std::size_t k = beta.k();
  const int d = beta.d;
  if (B.size() != k) throw ShapeMismatch("one box bound per polynomial expected");
  for (const auto& b : B)
    if (b <= 0) throw PreconditionError("box bounds must be positive");
  if (eta <= 0 || eta >= 1) throw PreconditionError("eta must lie in (0, 1)");

  const std::size_t n = k + static_cast<std::size_t>(d);
  LatticeBasis out;
  out.vectors = RatMatrix(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    out.vectors(i, i) = 1 / B[i];
    for (int j = 1; j <= d; ++j) {
      const Real& c = beta.coeff(i, j);
      out.vectors(i, k + static_cast<std::size_t>(j) - 1) = -c.mid() / qpow(eta, j);
      if (c.radius() > out.rounding_radius) out.rounding_radius = c.radius();
    }
  }
  for (int j = 1; j <= d; ++j) {
    std::size_t c = k + static_cast<std::size_t>(j) - 1;
    out.vectors(c, c) = 1 / qpow(eta, j);
  }
  mpq_class limit = qpow(eta, d) / mpq_class(mpz_class(1) << 20);
  if (out.rounding_radius > limit) throw PrecisionError("coefficient radius too large for the relation lattice");
  return out;
}

LatticeBasis reduce_basis(const LatticeBasis& basis) {
  const std::size_t n = basis.vectors.rows(), m = basis.vectors.cols();
  mpz_class L = 1;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), basis.vectors(r, c).get_den_mpz_t());
  IntMatrix scaled(n, m);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      mpq_class v = basis.vectors(r, c) * L;
      scaled(r, c) = v.get_num();
    }
  LllResult lll = lll_reduce_rows(scaled);

  std::vector<mpq_class> norms(n);
  RatMatrix reduced(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) reduced(r, c) = mpq_class(lll.basis(r, c), L);
    norms[r] = inf_norm(reduced.row(r));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });

  IntMatrix base_t = basis.transform.rows() == n ? basis.transform : IntMatrix::identity(n);
  IntMatrix t = lll.transform * base_t;

  LatticeBasis out;
  out.vectors = RatMatrix(n, m);
  out.transform = IntMatrix(n, n);
  out.reduced = true;
  out.rounding_radius = basis.rounding_radius;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) out.vectors(r, c) = reduced(order[r], c);
    for (std::size_t c = 0; c < n; ++c) out.transform(r, c) = t(order[r], c);
    out.minima.push_back(norms[order[r]]);
  }
  return out;
}

void enumerate_inf_ball(const RatMatrix& rows, const mpq_class& radius,
                        const std::function<void(const std::vector<mpz_class>&, const RatVector&)>& visit,
                        std::int64_t node_cap) {
  const std::size_t n = rows.rows(), m = rows.cols();
  if (n == 0) return;
  if (n > 8) throw PreconditionError("enumeration supports dimension at most 8");
  if (radius < 0) return;

  // Gram-Schmidt in long double; the box test at the leaves is exact.
  std::vector<std::vector<long double>> b(n, std::vector<long double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < m; ++c) b[i][c] = to_ld(rows(i, c));
  std::vector<std::vector<long double>> bs = b;
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> bn(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      long double dot = 0;
      for (std::size_t c = 0; c < m; ++c) dot += b[i][c] * bs[j][c];
      mu[i][j] = dot / bn[j];
      for (std::size_t c = 0; c < m; ++c) bs[i][c] -= mu[i][j] * bs[j][c];
    }
    bn[i] = 0;
    for (std::size_t c = 0; c < m; ++c) bn[i] += bs[i][c] * bs[i][c];
    if (!(bn[i] > 0)) throw SingularMatrix("enumeration basis is linearly dependent");
  }

  const long double R = to_ld(radius);
  const long double bound = static_cast<long double>(m) * R * R * (1 + 1e-12L) + 1e-300L;

  std::vector<long> c(n, 0);
  std::vector<mpz_class> cz(n);
  std::int64_t nodes = 0;

  // Depth-first over i = n-1 .. 0; `partial` is the squared length so far.
  std::function<void(std::size_t, long double)> rec = [&](std::size_t i, long double partial) {
    long double center = 0;
    for (std::size_t j = i + 1; j < n; ++j) center -= mu[j][i] * static_cast<long double>(c[j]);
    long double room = bound - partial;
    if (room < 0) return;
    long double half = std::sqrt(room / bn[i]);
    long lo = static_cast<long>(std::ceil(center - half - 1e-9L));
    long hi = static_cast<long>(std::floor(center + half + 1e-9L));
    for (long v = lo; v <= hi; ++v) {
      if (++nodes > node_cap) throw CapExceeded("lattice enumeration exceeded its node cap");
      c[i] = v;
      long double t = static_cast<long double>(v) - center;
      long double next = partial + t * t * bn[i];
      if (i == 0) {
        if (next > bound) continue;
        RatVector vec(m, 0);
        for (std::size_t r = 0; r < n; ++r) {
          if (c[r] == 0) continue;
          for (std::size_t col = 0; col < m; ++col) vec[col] += rows(r, col) * c[r];
        }
        if (inf_norm(vec) <= radius) {
          for (std::size_t r = 0; r < n; ++r) cz[r] = c[r];
          visit(cz, vec);
        }
      } else {
        rec(i - 1, next);
      }
    }
    c[i] = 0;
  };
  rec(n - 1, 0);
}

std::int64_t count_points_inf(const LatticeBasis& basis, const mpq_class& radius, std::int64_t node_cap) {
  std::int64_t count = 0;
  enumerate_inf_ball(basis.vectors, radius, [&](const std::vector<mpz_class>&, const RatVector&) { ++count; },
                     node_cap);
  return count;
}

mpq_class shortest_inf_norm(const LatticeBasis& basis, std::int64_t node_cap) {
  if (basis.vectors.rows() == 0) throw PreconditionError("empty lattice");
  mpq_class best = inf_norm(basis.vectors.row(0));
  for (std::size_t r = 1; r < basis.vectors.rows(); ++r) best = std::min(best, inf_norm(basis.vectors.row(r)));
  enumerate_inf_ball(
      basis.vectors, best,
      [&](const std::vector<mpz_class>& c, const RatVector& v) {
        bool zero = std::all_of(c.begin(), c.end(), [](const mpz_class& z) { return z == 0; });
        if (zero) return;
        mpq_class nv = inf_norm(v);
        if (nv < best) best = nv;
      },
      node_cap);
  return best;
}

bool in_region(const PolySystem& beta, const std::vector<mpq_class>& B, const mpq_class& eta,
               const std::vector<long>& h, const std::vector<mpz_class>& a) {
  const std::size_t k = beta.k();
  if (h.size() != k || B.size() != k || a.size() != static_cast<std::size_t>(beta.d))
    throw ShapeMismatch("region membership: wrong vector lengths");
  for (std::size_t i = 0; i < k; ++i)
    if (mpq_class(std::labs(h[i])) > B[i]) return false;
  for (int j = 1; j <= beta.d; ++j) {
    Real s = Real::exact(mpq_class(-a[static_cast<std::size_t>(j - 1)]));
    for (std::size_t i = 0; i < k; ++i)
      if (h[i] != 0) s = s + beta.coeff(i, j) * Real(h[i]);
    if (!s.abs().certainly_leq(Real::exact(qpow(eta, j)))) return false;
  }
  return true;
}

std::variant<GeneratorSet, NoShortVector> quasi_orthogonal_generators(const PolySystem& beta,
                                                                      const std::vector<mpq_class>& B,
                                                                      const mpq_class& eta,
                                                                      const GeneratorParams& params) {
  LatticeBasis lat = build_relation_lattice(beta, B, eta);
  LatticeBasis red = reduce_basis(lat);
  const std::size_t k = beta.k(), d = static_cast<std::size_t>(beta.d);
  if (params.n_target < 1) throw PreconditionError("n_target must be positive");

  std::size_t J = 0;
  while (J < red.minima.size() && red.minima[J] <= 1) ++J;
  if (J == 0) return NoShortVector{"no reduced vector inside the unit box"};

  std::size_t max_rank = params.max_rank ? params.max_rank : k;
  std::size_t r_max = std::min({std::max<std::size_t>(J > d ? J - d : 0, 1), max_rank, J, k});

  Real c_slack = params.c_slack.is_zero() ? Real::exact(mpq_class(mpz_class(1) << (k + d))) : params.c_slack;
  // tilde_product <= c * N^(-1/(d+1))  <=>  tp^(d+1) * N <= c^(d+1)
  auto product_ok = [&](const mpq_class& tp, const mpq_class& c) {
    return qpow(tp, static_cast<int>(d + 1)) * params.n_target <= qpow(c, static_cast<int>(d + 1));
  };

  struct Candidate {
    std::vector<std::size_t> idx;
    std::vector<std::vector<long>> h;
    std::vector<std::vector<mpz_class>> a;
    std::vector<RatVector> ht;
    mpq_class minor;
  };

  std::string last_reason = "no independent subset of short vectors";
  for (std::size_t r = r_max; r >= 1; --r) {
    std::vector<Candidate> cands;
    for (const auto& idx : combinations(J, r)) {
      Candidate cand;
      cand.idx = idx;
      bool ok = true;
      for (std::size_t t : idx) {
        std::vector<long> h(k);
        std::vector<mpz_class> a(d);
        for (std::size_t i = 0; i < k; ++i) {
          const mpz_class& z = red.transform(t, i);
          if (!z.fits_slong_p()) ok = false;
          h[i] = ok ? z.get_si() : 0;
        }
        for (std::size_t j = 0; j < d; ++j) a[j] = red.transform(t, k + j);
        auto nz = std::find_if(h.begin(), h.end(), [](long v) { return v != 0; });
        if (nz == h.end()) ok = false;
        if (!ok) break;
        if (*nz < 0) {
          for (auto& v : h) v = -v;
          for (auto& v : a) v = -v;
        }
        RatVector ht(k);
        for (std::size_t i = 0; i < k; ++i) ht[i] = mpq_class(h[i]) / B[i];
        cand.h.push_back(std::move(h));
        cand.a.push_back(std::move(a));
        cand.ht.push_back(std::move(ht));
      }
      if (!ok) continue;
      cand.minor = max_minor(cand.ht);
      if (cand.minor == 0) continue;
      cands.push_back(std::move(cand));
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& x, const Candidate& y) { return x.minor > y.minor; });

    for (const auto& cand : cands) {
      bool member = true;
      for (std::size_t t = 0; t < r && member; ++t) member = in_region(beta, B, eta, cand.h[t], cand.a[t]);
      if (!member) {
        last_reason = "membership not certified";
        continue;
      }
      Real wedge = wedge_norm(cand.ht);
      Real l2 = Real(1);
      mpq_class tp = 1;
      for (const auto& v : cand.ht) {
        l2 = l2 * euclid_norm(v);
        tp *= inf_norm(v);
      }
      Real orth = wedge / l2;
      if (!params.c_orth.certainly_leq(orth)) {
        last_reason = "orthogonality ratio below threshold";
        continue;
      }
      if (!product_ok(tp, c_slack.lower())) {
        last_reason = "product of norms above the slack bound";
        continue;
      }
      GeneratorSet g;
      g.r = r;
      g.h_vecs = cand.h;
      g.a_vecs = cand.a;
      g.B = B;
      g.eta = eta;
      g.h_tilde = cand.ht;
      g.tilde_product = tp;
      g.orth_ratio = orth;
      g.minor_ratio = Real::exact(cand.minor) / wedge;
      g.J = J;
      g.chosen = cand.idx;
      int s = 1;
      while (!product_ok(tp, mpq_class(s))) ++s;
      g.slack_level = s;
      return g;
    }
  }
  return NoShortVector{last_reason};
}

SublatticeReport sublattice_determinants(const IntMatrix& H1, const IntMatrix& H2) {
  const std::size_t r = H1.rows();
  if (H1.cols() != r) throw ShapeMismatch("H1 must be square");
  if (H2.rows() != r) throw ShapeMismatch("H1 and H2 need the same row count");
  SublatticeReport rep;
  rep.det1 = abs(determinant(H1));
  if (rep.det1 == 0) throw SingularMatrix("H1 is singular");
  const std::size_t k = r + H2.cols();
  IntMatrix m(r, k);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) m(a, b) = H1(a, b);
    for (std::size_t b = 0; b < H2.cols(); ++b) m(a, r + b) = H2(a, b);
  }
  ColumnEchelon ce = column_echelon(m);
  rep.triangular = ce.triangular;
  rep.transform = ce.transform;
  rep.det2 = abs(determinant(ce.triangular));
  rep.kernel = IntMatrix(k - r, k - r);
  for (std::size_t a = 0; a < k - r; ++a)
    for (std::size_t b = 0; b < k - r; ++b) rep.kernel(a, b) = ce.transform(r + a, r + b);
  rep.det3 = abs(determinant(rep.kernel));
  rep.identity_holds = rep.det1 == rep.det2 * rep.det3;
  return rep;
}

}  // namespace fracparts
