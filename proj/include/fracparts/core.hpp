#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracparts/errors.hpp"
#include "fracparts/real.hpp"

namespace fracparts {

inline constexpr std::int64_t kDefaultEnumCap = 100'000'000;

/// f(X) = sum_{j=1..d} coeffs[j-1] X^j. No constant term.
struct Poly {
  std::vector<Real> coeffs;

  int degree_bound() const { return static_cast<int>(coeffs.size()); }
  bool is_exact() const;
};

struct PolySystem {
  int d = 1;
  std::vector<Poly> polys;

  std::size_t k() const { return polys.size(); }
  /// Throws PreconditionError on k == 0, d < 1 or ragged coefficient lists.
  void validate() const;
  const Real& coeff(std::size_t i, int j) const { return polys[i].coeffs[static_cast<std::size_t>(j - 1)]; }
};

class Epsilons {
 public:
  Epsilons() = default;
  /// Each entry must lie in (0, 1/2]; throws PreconditionError otherwise.
  explicit Epsilons(std::vector<Real> eps);

  const std::vector<Real>& values() const { return eps_; }
  const Real& operator[](std::size_t i) const { return eps_[i]; }
  std::size_t size() const { return eps_.size(); }
  /// Product of the entries, recomputed on every call.
  Real delta_product() const;
  /// True when some entry exceeds 1/100 (outside the regime the reduction is tuned for).
  bool outside_hypothesis() const;

 private:
  std::vector<Real> eps_;
};

struct SystemState {
  PolySystem system;
  Epsilons eps;
  Real y;

  std::size_t k() const { return system.k(); }
  void validate() const;
};

/// f(n) as a ball (exact for rational coefficients).
Real eval_poly(const Poly& p, const mpz_class& n);

/// (frac_dist(f_1(n)), ..., frac_dist(f_k(n))).
std::vector<Real> eval_system(const PolySystem& system, std::int64_t n);

/// max_i frac_dist(f_i(n)).
Real max_dist(const PolySystem& system, std::int64_t n);

/// True when frac_dist(f_i(n)) < eps_i for all i, decided exactly; throws
/// PrecisionError if a ball straddles a bound.
bool meets_all(const PolySystem& system, const Epsilons& eps, std::int64_t n);

struct MinResult {
  std::int64_t n = 0;
  Real value;
};

/// Smallest n in {1, ..., ceil(x)-1} minimizing max_i frac_dist(f_i(n)).
MinResult brute_force_min(const PolySystem& system, const Real& x, std::int64_t enum_cap = kDefaultEnumCap);

/// #{1 <= n <= floor(x) : frac_dist(f_i(n)) < eps_i for all i}.
std::int64_t hit_count(const PolySystem& system, const Epsilons& eps, const Real& x,
                       std::int64_t enum_cap = kDefaultEnumCap);

/// Smallest n < x meeting all bounds, if any.
std::optional<std::int64_t> first_hit(const PolySystem& system, const Epsilons& eps, const Real& x,
                                      std::int64_t enum_cap = kDefaultEnumCap);

/// Running minimum of max_i frac_dist over n < checkpoint, for ascending
/// checkpoints, in one pass. Values are long double approximations (the
/// kernel error is below 2^-40).
std::vector<long double> running_min(const PolySystem& system, const std::vector<std::int64_t>& checkpoints,
                                     std::int64_t enum_cap = kDefaultEnumCap);

}  // namespace fracparts
