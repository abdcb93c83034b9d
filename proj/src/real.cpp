#include "fracparts/real.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "fracparts/errors.hpp"

namespace fracparts {
namespace {

mpq_class pow2(long e) {
  mpq_class r(1);
  if (e >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  r.canonicalize();
  return r;
}

mpq_class abs_q(const mpq_class& q) { return sgn(q) < 0 ? mpq_class(-q) : q; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

mpz_class parse_unsigned(std::string_view s, std::string_view whole) {
  if (!all_digits(s)) throw ParseError("malformed integer in coefficient '" + std::string(whole) + "'");
  return mpz_class(std::string(s), 10);
}

mpq_class parse_decimal(std::string_view s, std::string_view whole) {
  std::string_view mant = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mant = s.substr(0, e);
    std::string_view ex = s.substr(e + 1);
    bool neg = false;
    if (!ex.empty() && (ex.front() == '+' || ex.front() == '-')) {
      neg = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (!all_digits(ex) || ex.size() > 6) throw ParseError("malformed exponent in '" + std::string(whole) + "'");
    exponent = std::stol(std::string(ex));
    if (neg) exponent = -exponent;
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = mant.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw ParseError("malformed decimal '" + std::string(whole) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mant)) throw ParseError("malformed number '" + std::string(whole) + "'");
    digits = std::string(mant);
  }
  mpq_class value{mpz_class(digits, 10)};
  long shift = exponent - frac_digits;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0) {
    value *= ten_pow;
  } else {
    value /= ten_pow;
  }
  value.canonicalize();
  return value;
}

// floor(sqrt(v)) for v >= 0.
mpz_class isqrt(const mpz_class& v) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

bool is_square(const mpz_class& v) { return sgn(v) >= 0 && mpz_perfect_square_p(v.get_mpz_t()) != 0; }

// Upper bound on sqrt(q), q >= 0, on the grid 2^-p.
mpq_class sqrt_upper(const mpq_class& q, int p) {
  mpz_class scaled = ceil_of(q * pow2(2L * p));
  mpz_class s = isqrt(scaled);
  if (s * s < scaled) s += 1;
  return mpq_class(s) * pow2(-p);
}

// Lower bound on sqrt(q), q >= 0, on the grid 2^-p.
mpq_class sqrt_lower(const mpq_class& q, int p) {
  mpz_class scaled = floor_of(q * pow2(2L * p));
  return mpq_class(isqrt(scaled)) * pow2(-p);
}

}  // namespace

Real Real::ball(mpq_class mid, mpq_class radius, int precision_bits) {
  Real r;
  r.mid_ = std::move(mid);
  r.mid_.canonicalize();
  r.rad_ = abs_q(radius);
  r.exact_ = false;
  r.prec_ = precision_bits;
  r.round_to_grid();
  return r;
}

Real Real::from_long_double(long double v) {
  if (!std::isfinite(v)) throw PrecisionError("non-finite value cannot become a Real");
  int e = 0;
  long double m = std::frexp(v, &e);
  // 64-bit mantissa: scale to an exact integer.
  long double scaled = std::ldexp(m, 64);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  auto hi = static_cast<unsigned long>(std::floor(std::ldexp(scaled, -32)));
  auto lo = static_cast<unsigned long>(scaled - std::ldexp(static_cast<long double>(hi), 32));
  mpz_class n = mpz_class(hi) * mpz_class(4294967296UL) + mpz_class(lo);
  mpq_class q(n);
  q *= pow2(e - 64);
  if (neg) q = -q;
  return Real(q);
}

void Real::round_to_grid() {
  if (exact_) return;
  mpq_class scale = pow2(prec_);
  mpq_class rounded(round_of(mid_ * scale));
  rounded /= scale;
  rounded.canonicalize();
  mpq_class diff = abs_q(mid_ - rounded);
  mid_ = rounded;
  rad_ += diff;
  // Keep the radius on a fine grid so denominators stay bounded.
  mpq_class rscale = pow2(prec_ + 64);
  rad_ = mpq_class(ceil_of(rad_ * rscale)) / rscale;
  rad_.canonicalize();
}

void Real::widen(const mpq_class& extra) {
  rad_ += extra;
  rad_.canonicalize();
}

long double Real::to_long_double() const {
  mpfr_t t;
  mpfr_init2(t, 80);
  mpfr_set_q(t, mid_.get_mpq_t(), MPFR_RNDN);
  long double r = mpfr_get_ld(t, MPFR_RNDN);
  mpfr_clear(t);
  return r;
}

Real Real::operator-() const {
  Real r = *this;
  r.mid_ = -r.mid_;
  return r;
}

Real& Real::operator+=(const Real& o) {
  mid_ += o.mid_;
  if (exact_ && o.exact_) return *this;
  prec_ = exact_ ? o.prec_ : (o.exact_ ? prec_ : std::max(prec_, o.prec_));
  exact_ = false;
  widen(o.rad_);
  round_to_grid();
  return *this;
}

Real& Real::operator-=(const Real& o) { return *this += -o; }

Real& Real::operator*=(const Real& o) {
  if (exact_ && o.exact_) {
    mid_ *= o.mid_;
    return *this;
  }
  mpq_class rad = abs_q(mid_) * o.rad_ + abs_q(o.mid_) * rad_ + rad_ * o.rad_;
  prec_ = exact_ ? o.prec_ : (o.exact_ ? prec_ : std::max(prec_, o.prec_));
  mid_ *= o.mid_;
  rad_ = rad;
  exact_ = false;
  round_to_grid();
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.exact_) {
    if (sgn(o.mid_) == 0) throw PrecisionError("division by zero");
    mid_ /= o.mid_;
    if (!exact_) {
      rad_ /= abs_q(o.mid_);
      round_to_grid();
    }
    return *this;
  }
  mpq_class denom = abs_q(o.mid_) - o.rad_;
  if (sgn(denom) <= 0) throw PrecisionError("division by a ball containing zero");
  mpq_class q = mid_ / o.mid_;
  mpq_class rad = (rad_ + abs_q(q) * o.rad_) / denom;
  prec_ = exact_ ? o.prec_ : std::max(prec_, o.prec_);
  mid_ = q;
  rad_ = rad;
  exact_ = false;
  round_to_grid();
  return *this;
}

Real Real::abs() const {
  Real r = *this;
  r.mid_ = abs_q(r.mid_);
  return r;
}

Real Real::sqrt(int precision_bits) const {
  if (sgn(upper()) < 0) throw PrecisionError("square root of a negative value");
  mpq_class m = sgn(mid_) < 0 ? mpq_class(0) : mid_;
  if (exact_ && is_square(m.get_num()) && is_square(m.get_den())) {
    return Real(mpq_class(isqrt(m.get_num()), isqrt(m.get_den())));
  }
  int p = precision_bits > 0 ? precision_bits : prec_;
  mpz_class s = isqrt(floor_of(m * pow2(2L * p)));
  // sqrt(m) * 2^p lies in [s, s+1).
  mpq_class mid = (mpq_class(s) + mpq_class(1, 2)) * pow2(-p);
  mpq_class rad = pow2(-p - 1);
  if (sgn(rad_) > 0) {
    mpq_class lo = lower();
    mpq_class root_lo = sgn(lo) > 0 ? sqrt_lower(lo, p + 32) : mpq_class(0);
    if (sgn(root_lo) > 0) {
      rad += rad_ / root_lo;
    } else {
      rad += sqrt_upper(rad_, p + 32);
    }
  }
  return Real::ball(mid, rad, p);
}

std::string Real::to_string() const {
  if (exact_) return mid_.get_str();
  return "ball(" + mid_.get_str() + "," + rad_.get_str() + "," + std::to_string(prec_) + ")";
}

Real Real::parse(std::string_view text, int precision_bits) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty coefficient string");
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Real value;
  if (s.rfind("sqrt(", 0) == 0) {
    auto close = s.find(')');
    if (close == std::string_view::npos) throw ParseError("unterminated sqrt( in '" + std::string(text) + "'");
    mpz_class m = parse_unsigned(s.substr(5, close - 5), text);
    std::string_view rest = s.substr(close + 1);
    mpz_class q = 1;
    if (!rest.empty()) {
      if (rest.front() != '/') throw ParseError("expected '/q' after sqrt(m) in '" + std::string(text) + "'");
      q = parse_unsigned(rest.substr(1), text);
    }
    if (sgn(q) == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    value = Real(mpq_class(m)).sqrt(precision_bits) / Real(mpq_class(q));
  } else if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class p = parse_unsigned(s.substr(0, slash), text);
    mpz_class q = parse_unsigned(s.substr(slash + 1), text);
    if (sgn(q) == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    value = Real(mpq_class(p, q));
  } else {
    value = Real(parse_decimal(s, text));
  }
  return neg ? -value : value;
}

Real Real::from_string(std::string_view text) {
  std::string_view s = trim(text);
  if (s.rfind("ball(", 0) != 0) return parse(s);
  if (s.back() != ')') throw ParseError("malformed ball '" + std::string(text) + "'");
  std::string_view body = s.substr(5, s.size() - 6);
  auto c1 = body.find(',');
  auto c2 = body.rfind(',');
  if (c1 == std::string_view::npos || c1 == c2) throw ParseError("malformed ball '" + std::string(text) + "'");
  try {
    mpq_class mid(std::string(body.substr(0, c1)), 10);
    mpq_class rad(std::string(body.substr(c1 + 1, c2 - c1 - 1)), 10);
    int prec = std::stoi(std::string(body.substr(c2 + 1)));
    mid.canonicalize();
    rad.canonicalize();
    Real r;
    r.mid_ = mid;
    r.rad_ = rad;
    r.exact_ = false;
    r.prec_ = prec;
    return r;
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed ball '" + std::string(text) + "'");
  }
}

Real frac_part(const Real& t) {
  return t - Real(mpq_class(floor_of(t.mid())));
}

Real frac_dist(const Real& t) {
  Real f = frac_part(t);
  if (f.mid() <= mpq_class(1, 2)) return f;
  return Real(1) - f;
}

mpz_class floor_of(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class ceil_of(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class round_of(const mpq_class& q) { return floor_of(q + mpq_class(1, 2)); }

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw PrecisionError("integer " + z.get_str() + " exceeds 64 bits");
  return z.get_si();
}

std::int64_t largest_below(const Real& x) { return to_int64(ceil_of(x.mid()) - 1); }

std::int64_t floor_int(const Real& x) { return to_int64(floor_of(x.mid())); }

}  // namespace fracparts
