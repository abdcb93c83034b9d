#include "fracparts/matrix.hpp"

#include "fracparts/real.hpp"

namespace fracparts {

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = mpq_class(m(r, c));
  return out;
}

mpz_class determinant(const IntMatrix& input) {
  if (input.rows() != input.cols()) throw ShapeMismatch("determinant of a non-square matrix");
  const std::size_t n = input.rows();
  if (n == 0) return 1;
  IntMatrix a = input;
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  mpz_class d = a(n - 1, n - 1);
  return sign < 0 ? mpz_class(-d) : d;
}

mpq_class determinant(const RatMatrix& input) {
  if (input.rows() != input.cols()) throw ShapeMismatch("determinant of a non-square matrix");
  const std::size_t n = input.rows();
  RatMatrix a = input;
  mpq_class det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      a.swap_rows(k, p);
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      mpq_class f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

RatMatrix inverse(const RatMatrix& input) {
  if (input.rows() != input.cols()) throw ShapeMismatch("inverse of a non-square matrix");
  const std::size_t n = input.rows();
  RatMatrix a = input;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) throw SingularMatrix("matrix is singular");
    a.swap_rows(k, p);
    inv.swap_rows(k, p);
    mpq_class pivot = a(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) /= pivot;
      inv(k, j) /= pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      mpq_class f = a(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

namespace {

// Replace columns (i, c) by (s*ci + t*cc, -(b/g)*ci + (a/g)*cc); unimodular.
void combine_columns(IntMatrix& m, std::size_t i, std::size_t c, const mpz_class& s, const mpz_class& t,
                     const mpz_class& u, const mpz_class& v) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    mpz_class xi = m(r, i), xc = m(r, c);
    m(r, i) = s * xi + t * xc;
    m(r, c) = u * xi + v * xc;
  }
}

}  // namespace

ColumnEchelon column_echelon(const IntMatrix& input) {
  const std::size_t r = input.rows(), n = input.cols();
  if (r > n) throw SingularMatrix("more rows than columns: rank cannot equal row count");
  IntMatrix m = input;
  IntMatrix u = IntMatrix::identity(n);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t c = i + 1; c < n; ++c) {
      if (m(i, c) == 0) continue;
      mpz_class a = m(i, i), b = m(i, c), g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      mpz_class nb = -b / g, na = a / g;
      combine_columns(m, i, c, s, t, nb, na);
      combine_columns(u, i, c, s, t, nb, na);
    }
    if (m(i, i) == 0) throw SingularMatrix("matrix does not have full row rank");
    if (m(i, i) < 0) {
      for (std::size_t row = 0; row < r; ++row) m(row, i) = -m(row, i);
      for (std::size_t row = 0; row < n; ++row) u(row, i) = -u(row, i);
    }
  }
  IntMatrix t(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) t(a, b) = m(a, b);
  return {std::move(t), std::move(u)};
}

namespace {

mpz_class dot_rows(const IntMatrix& m, std::size_t a, std::size_t b) {
  mpz_class s = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) s += m(a, c) * m(b, c);
  return s;
}

void sub_row_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const mpz_class& q) {
  for (std::size_t c = 0; c < m.cols(); ++c) m(dst, c) -= q * m(src, c);
}

mpz_class exact_div(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace

// Integral LLL with exact subdeterminants d_i and scaled Gram-Schmidt
// coefficients lambda_{k,j} = d_j * mu_{k,j}; indices are 1-based internally.
LllResult lll_reduce_rows(const IntMatrix& rows, const mpq_class& delta) {
  const std::size_t n = rows.rows();
  IntMatrix b = rows;
  IntMatrix h = IntMatrix::identity(n);
  if (n == 0) return {b, h};
  const mpz_class num = delta.get_num(), den = delta.get_den();

  std::vector<mpz_class> d(n + 1, 0);
  std::vector<std::vector<mpz_class>> lam(n + 1, std::vector<mpz_class>(n + 1, 0));
  auto B = [&](std::size_t i) { return i - 1; };  // 1-based -> row index

  d[0] = 1;
  d[1] = dot_rows(b, 0, 0);
  if (d[1] == 0) throw SingularMatrix("lattice basis is linearly dependent");
  if (n == 1) return {b, h};

  auto red = [&](std::size_t k, std::size_t l) {
    mpz_class twice = 2 * abs(lam[k][l]);
    if (twice <= d[l]) return;
    mpz_class q = round_of(mpq_class(lam[k][l], d[l]));
    sub_row_multiple(b, B(k), B(l), q);
    sub_row_multiple(h, B(k), B(l), q);
    lam[k][l] -= q * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k][i] -= q * lam[l][i];
  };

  std::size_t kmax = 1;
  auto swap_step = [&](std::size_t k) {
    b.swap_rows(B(k), B(k - 1));
    h.swap_rows(B(k), B(k - 1));
    for (std::size_t j = 1; j + 2 <= k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    mpz_class l = lam[k][k - 1];
    mpz_class bb = exact_div(d[k - 2] * d[k] + l * l, d[k - 1]);
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      mpz_class t = lam[i][k];
      lam[i][k] = exact_div(d[k] * lam[i][k - 1] - l * t, d[k - 1]);
      lam[i][k - 1] = exact_div(bb * t + l * lam[i][k], d[k]);
    }
    d[k - 1] = bb;
  };

  std::size_t k = 2;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        mpz_class u = dot_rows(b, B(k), B(j));
        for (std::size_t i = 1; i < j; ++i) u = exact_div(d[i] * u - lam[k][i] * lam[j][i], d[i - 1]);
        if (j < k) {
          lam[k][j] = u;
        } else {
          d[k] = u;
          if (u == 0) throw SingularMatrix("lattice basis is linearly dependent");
        }
      }
    }
    red(k, k - 1);
    if (den * d[k] * d[k - 2] < num * d[k - 1] * d[k - 1] - den * lam[k][k - 1] * lam[k][k - 1]) {
      swap_step(k);
      k = k > 2 ? k - 1 : 2;
    } else {
      for (std::size_t l = k - 1; l-- > 1;) red(k, l);
      ++k;
    }
  }
  return {b, h};
}

}  // namespace fracparts
