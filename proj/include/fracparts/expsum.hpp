#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fracparts/core.hpp"

namespace fracparts {

using FrequencyVector = std::vector<long>;

inline constexpr std::int64_t kDefaultMaxBox = 200'000;

/// Sum as a pair of balls.
struct WeylValue {
  Real re;
  Real im;
  Real modulus_sq() const { return re * re + im * im; }
  long double modulus() const;
};

/// sum_{n=1..floor(x)} e(sum_i h_i f_i(n)), phases reduced mod 1 exactly on
/// the rational midpoints, exponentials in MPFR at `precision_bits`.
WeylValue weyl_sum(const PolySystem& system, const FrequencyVector& h, const Real& x,
                   int precision_bits = kDefaultPrecisionBits);

/// Same sum in double precision through the fixed-point kernel (abs error
/// roughly 1e-15 * floor(x)).
std::complex<double> weyl_sum_fast(const PolySystem& system, const FrequencyVector& h, const Real& x);

/// Plateau 1 on |u| <= 1/2, support |u| < 1, C^2 piecewise cubic.
long double phi(long double u);
/// Fourier transform of phi at xi (phi is even, so this is real).
long double phi_hat(long double xi);

struct SmoothingKernel {
  int fourier_tail_cut = 8;  // frequencies |h| <= ceil(tail_cut / eps) are kept
};

struct SmoothedCount {
  Real value;
  std::int64_t inner = 0;    // terms equal to 1
  std::int64_t partial = 0;  // terms strictly between 0 and 1
};

/// sum_{n <= x} prod_i Phi_i(f_i(n)) with Phi_i(t) = sum_m phi((t + m) / eps_i).
SmoothedCount smoothed_count(const PolySystem& system, const Epsilons& eps, const Real& x,
                             const SmoothingKernel& kernel = {}, std::int64_t enum_cap = kDefaultEnumCap);

/// The same quantity through the frequency side, truncated per the kernel.
long double smoothed_count_fourier(const PolySystem& system, const Epsilons& eps, const Real& x,
                                   const SmoothingKernel& kernel = {});

enum class Branch { HitDensity, LargeCoefficients };

struct Witness {
  FrequencyVector h;
  Real sum_modulus;
};

struct FourierDichotomy {
  Branch branch = Branch::HitDensity;
  std::int64_t density_count = 0;
  std::int64_t Q = 0;  // 2^j
  std::vector<Witness> witnesses;
  bool threshold_met = true;  // false when no class reached Q^(1/2) members
  std::vector<long> h_cap;
  std::int64_t box_size = 0;
};

/// floor(eps_i^-1 * Delta^(-1/(2k)^4)) for each i.
std::vector<long> h_caps(const Epsilons& eps);

/// Smallest j >= 1 with |S| >= x / 2^j (inclusive windows), or -1 when |S| = 0
/// at every scale up to 2^-62.
int dyadic_class(const WeylValue& s, const Real& x);

/// True when x/2^j <= |S| <= x/2^(j-1) (boundaries inclusive, ambiguous balls
/// accepted).
bool in_dyadic_window(const WeylValue& s, const Real& x, int j);

FourierDichotomy large_coefficients(const PolySystem& system, const Epsilons& eps, const Real& x,
                                    const Real& c_hit, std::int64_t max_box = kDefaultMaxBox,
                                    std::int64_t enum_cap = kDefaultEnumCap);

struct WeylBoundReport {
  long double lhs = 0;
  long double rhs = 0;
  bool pass = false;
};

/// Empirical probe of |sum_{n<=x} e(alpha f(n))| against
/// C_check * (x / q^c_d + x / (x^d / q)^c_d).
WeylBoundReport verify_weyl_bound(const Poly& f, const Real& alpha, long a, long q, const Real& x,
                                  const Real& q_decl, long double c_d, long double c_check);

}  // namespace fracparts
