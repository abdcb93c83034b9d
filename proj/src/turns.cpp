#include "fracparts/turns.hpp"

#include <cmath>

namespace fracparts {

namespace {

u128 mpz_to_u128(const mpz_class& z) {
  // z is in [0, 2^128).
  mpz_class hi = z >> 64;
  mpz_class lo = z - (hi << 64);
  auto h = static_cast<std::uint64_t>(mpz_get_ui(hi.get_mpz_t()));
  auto l = static_cast<std::uint64_t>(mpz_get_ui(lo.get_mpz_t()));
  return (static_cast<u128>(h) << 64) | l;
}

long double binom_sum(long double len, int d) {
  long double term = 1, total = 1;
  for (int m = 1; m <= d; ++m) {
    term = term * (len - m + 1) / m;
    if (term < 0) term = 0;
    total += term;
  }
  return total;
}

bool is_pow2(const mpz_class& z) { return z > 0 && mpz_popcount(z.get_mpz_t()) == 1; }

}  // namespace

u128 to_turns(const mpq_class& q, bool* exact) {
  mpq_class fr = q - mpq_class(floor_of(q));
  mpz_class scaled_num = fr.get_num() << 128;
  mpz_class twice = (scaled_num << 1) + fr.get_den();
  mpz_class rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), twice.get_mpz_t(), mpz_class(fr.get_den() << 1).get_mpz_t());
  if (exact) *exact = mpz_divisible_p(scaled_num.get_mpz_t(), fr.get_den().get_mpz_t()) != 0;
  mpz_class one = mpz_class(1) << 128;
  if (rounded >= one) rounded -= one;
  return mpz_to_u128(rounded);
}

long double turns_to_ld(u128 t) {
  auto hi = static_cast<std::uint64_t>(t >> 64);
  auto lo = static_cast<std::uint64_t>(t);
  return std::ldexp(static_cast<long double>(hi), -64) + std::ldexp(static_cast<long double>(lo), -128);
}

PolyStepper::PolyStepper(const Poly& p, std::int64_t n_max) {
  d_ = p.degree_bound();
  mids_.reserve(p.coeffs.size());
  bool dyadic = true;
  long double ball_units = 0;
  const long double nm = static_cast<long double>(std::max<std::int64_t>(n_max, 1));
  for (int j = 1; j <= d_; ++j) {
    const Real& c = p.coeffs[static_cast<std::size_t>(j - 1)];
    mids_.push_back(c.mid());
    const mpz_class& den = c.mid().get_den();
    if (!is_pow2(den) || mpz_sizeinbase(den.get_mpz_t(), 2) > 129) dyadic = false;
    if (sgn(c.radius()) > 0) {
      long double r = std::ldexp(c.radius().get_d(), 128) * 1.0001L;
      ball_units += r * std::pow(nm, static_cast<long double>(j));
    }
  }
  block_ = 65536;
  const long double cap = std::ldexp(1.0L, 60);
  while (block_ > 1 && binom_sum(static_cast<long double>(block_), d_) > cap) block_ /= 2;
  long double rounding = dyadic ? 0.0L : binom_sum(static_cast<long double>(block_), d_);
  err_units_ = rounding + ball_units;
  if (!(err_units_ < kMaxErrUnits))
    throw PrecisionError("phase error bound exceeds 2^-40 turns; raise the precision or lower the horizon");
  diff_.assign(static_cast<std::size_t>(d_) + 1, 0);
}

void PolyStepper::seek(std::int64_t n) {
  std::vector<mpq_class> vals(static_cast<std::size_t>(d_) + 1);
  for (int i = 0; i <= d_; ++i) {
    mpq_class arg(n + i);
    mpq_class acc = 0;
    for (int j = d_; j >= 1; --j) {
      acc += mids_[static_cast<std::size_t>(j - 1)];
      acc *= arg;
    }
    vals[static_cast<std::size_t>(i)] = acc;
  }
  for (int m = 1; m <= d_; ++m)
    for (int i = d_; i >= m; --i) vals[static_cast<std::size_t>(i)] -= vals[static_cast<std::size_t>(i - 1)];
  for (int m = 0; m <= d_; ++m) diff_[static_cast<std::size_t>(m)] = to_turns(vals[static_cast<std::size_t>(m)]);
  n_ = n;
  since_seek_ = 0;
}

void PolyStepper::next() {
  for (int m = 0; m < d_; ++m) diff_[static_cast<std::size_t>(m)] += diff_[static_cast<std::size_t>(m) + 1];
  ++n_;
  if (++since_seek_ >= block_) seek(n_);
}

SystemStepper::SystemStepper(const PolySystem& system, std::int64_t n_max) {
  steppers_.reserve(system.k());
  for (const auto& p : system.polys) {
    steppers_.emplace_back(p, n_max);
    auto e = static_cast<u128>(std::ceil(steppers_.back().err_units())) + 1;
    err_.push_back(e);
    if (e > max_err_) max_err_ = e;
  }
}

void SystemStepper::seek(std::int64_t n) {
  for (auto& s : steppers_) s.seek(n);
}

void SystemStepper::next() {
  for (auto& s : steppers_) s.next();
}

TurnBound to_turn_bound(const Real& eps) {
  TurnBound b;
  b.value = to_turns(eps.mid());
  if (eps.mid() >= 1) b.value = static_cast<u128>(0) - 1;
  long double r = std::ldexp(eps.radius().get_d(), 128);
  b.err = static_cast<u128>(std::ceil(r * 1.0001L)) + 1;
  return b;
}

}  // namespace fracparts
