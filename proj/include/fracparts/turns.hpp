#pragma once

// Fixed-point phase kernel. A phase t in R/Z is held as round(frac(t) * 2^128)
// in an unsigned 128-bit integer, so reduction mod 1 is plain wraparound.
// Polynomials are stepped with forward differences, reseeded exactly from
// rational midpoints every block.

#include <cstdint>
#include <vector>

#include "fracparts/core.hpp"

namespace fracparts {

using u128 = unsigned __int128;

inline constexpr u128 kHalfTurn = static_cast<u128>(1) << 127;

/// round(frac(q) * 2^128) mod 2^128; sets *exact when no rounding happened.
u128 to_turns(const mpq_class& q, bool* exact = nullptr);

/// Distance to the nearest integer, in turns (at most 2^127).
inline u128 turns_dist(u128 t) { return t <= kHalfTurn ? t : static_cast<u128>(0) - t; }

/// Turns to long double in [0, 1).
long double turns_to_ld(u128 t);

/// Error bounds are kept in units of 2^-128 as long double; this is the
/// ceiling for certified work (2^-40 turns).
inline constexpr long double kMaxErrUnits = 309485009821345068724781056.0L;  // 2^88

class PolyStepper {
 public:
  /// `n_max` is the largest argument that will be visited; it fixes the
  /// block length and the error bound.
  PolyStepper(const Poly& p, std::int64_t n_max);

  /// Reseed at n exactly (differences recomputed from the midpoints).
  void seek(std::int64_t n);
  void next();
  u128 value() const { return diff_[0]; }
  std::int64_t position() const { return n_; }

  /// Bound on |value - frac(true f(n))| in units, valid for every n visited.
  long double err_units() const { return err_units_; }
  std::int64_t block_length() const { return block_; }

 private:
  std::vector<mpq_class> mids_;
  std::vector<u128> diff_;
  std::int64_t n_ = 0;
  std::int64_t since_seek_ = 0;
  std::int64_t block_ = 1;
  long double err_units_ = 0;
  int d_ = 0;
};

/// Steps every polynomial of a system together; value(i) is f_i(n) in turns.
class SystemStepper {
 public:
  SystemStepper(const PolySystem& system, std::int64_t n_max);
  void seek(std::int64_t n);
  void next();
  std::int64_t position() const { return steppers_.front().position(); }
  u128 value(std::size_t i) const { return steppers_[i].value(); }
  std::size_t size() const { return steppers_.size(); }
  /// Error bound per polynomial, rounded up to whole units.
  const std::vector<u128>& err() const { return err_; }
  u128 max_err() const { return max_err_; }

 private:
  std::vector<PolyStepper> steppers_;
  std::vector<u128> err_;
  u128 max_err_ = 0;
};

/// A bound eps as turns with its own error (units).
struct TurnBound {
  u128 value = 0;
  u128 err = 0;
};
TurnBound to_turn_bound(const Real& eps);

enum class Cmp { Less, NotLess, Unsure };

/// Decides dist < bound for dist known within +-dist_err.
inline Cmp certified_less(u128 dist, u128 dist_err, const TurnBound& b) {
  u128 slack = dist_err + b.err;
  if (dist + slack < b.value) return Cmp::Less;
  if (dist > b.value + slack) return Cmp::NotLess;
  return Cmp::Unsure;
}

}  // namespace fracparts
