#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace fracparts {

inline constexpr int kDefaultPrecisionBits = 192;

/// A real number held as a rational midpoint plus an error radius.
///
/// Exact values (radius zero) come from rational input and stay exact under
/// +, -, * and division by exact nonzero values. Values derived from an
/// irrational input carry a radius; after every operation their midpoint is
/// rounded to the grid 2^-precision and the rounding is added to the radius,
/// so the true value always lies in [mid - radius, mid + radius].
class Real {
 public:
  Real() = default;
  Real(long v) : mid_(v) {}  // NOLINT(google-explicit-constructor)
  Real(int v) : mid_(v) {}   // NOLINT(google-explicit-constructor)
  explicit Real(mpq_class v) : mid_(std::move(v)) { mid_.canonicalize(); }

  static Real exact(mpq_class v) { return Real(std::move(v)); }
  static Real ball(mpq_class mid, mpq_class radius, int precision_bits);
  static Real from_long_double(long double v);

  /// Coefficient grammar: optional sign, then a decimal (with optional
  /// exponent), "p/q", or "sqrt(m)" / "sqrt(m)/q". Decimals and fractions are
  /// exact; square roots of non-squares are balls at `precision_bits`.
  static Real parse(std::string_view text, int precision_bits = kDefaultPrecisionBits);

  /// Inverse of to_string(); accepts everything parse() accepts as well.
  static Real from_string(std::string_view text);

  const mpq_class& mid() const { return mid_; }
  const mpq_class& radius() const { return rad_; }
  bool is_exact() const { return exact_; }
  int precision() const { return prec_; }

  double to_double() const { return mid_.get_d(); }
  long double to_long_double() const;

  Real operator-() const;
  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }

  Real abs() const;
  /// Square root of a nonnegative value; exact for perfect rational squares.
  /// Inexact results use `precision_bits`, or the value's own precision when
  /// that is negative.
  Real sqrt(int precision_bits = -1) const;

  mpq_class lower() const { return mid_ - rad_; }
  mpq_class upper() const { return mid_ + rad_; }

  /// True when every point of this ball is < every point of `o`.
  bool certainly_less(const Real& o) const { return upper() < o.lower(); }
  bool certainly_leq(const Real& o) const { return upper() <= o.lower(); }
  bool certainly_positive() const { return lower() > 0; }
  bool is_zero() const { return exact_ && sgn(mid_) == 0; }

  /// Canonical text: "p/q" for exact values, "ball(mid,rad,prec)" otherwise.
  std::string to_string() const;

  friend bool operator==(const Real& a, const Real& b) {
    return a.exact_ == b.exact_ && a.mid_ == b.mid_ && a.rad_ == b.rad_;
  }

 private:
  void round_to_grid();
  void widen(const mpq_class& extra);

  mpq_class mid_{0};
  mpq_class rad_{0};
  bool exact_ = true;
  int prec_ = kDefaultPrecisionBits;
};

/// Value reduced into [0, 1); the radius is unchanged.
Real frac_part(const Real& t);

/// Distance to the nearest integer, in [0, 1/2].
Real frac_dist(const Real& t);

mpz_class floor_of(const mpq_class& q);
mpz_class ceil_of(const mpq_class& q);
/// Nearest integer, halves rounded up.
mpz_class round_of(const mpq_class& q);

/// Largest integer n with n < x (uses the midpoint of x).
std::int64_t largest_below(const Real& x);
/// floor(x) (uses the midpoint of x).
std::int64_t floor_int(const Real& x);

std::int64_t to_int64(const mpz_class& z);

}  // namespace fracparts
