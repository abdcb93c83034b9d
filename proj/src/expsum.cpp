#include "fracparts/expsum.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "fracparts/turns.hpp"

namespace fracparts {

namespace {

constexpr long double kTwoPi = 6.283185307179586476925286766559005768L;

Poly combine(const PolySystem& system, const FrequencyVector& h) {
  if (h.size() != system.k()) throw ShapeMismatch("frequency vector length differs from k");
  Poly p;
  for (int j = 1; j <= system.d; ++j) {
    Real c(0);
    for (std::size_t i = 0; i < system.k(); ++i)
      if (h[i] != 0) c += Real(h[i]) * system.coeff(i, j);
    p.coeffs.push_back(c);
  }
  return p;
}

struct ETable {
  std::array<double, 4096> c{}, s{};
  ETable() {
    for (int i = 0; i < 4096; ++i) {
      long double a = kTwoPi * i / 4096.0L;
      c[static_cast<std::size_t>(i)] = static_cast<double>(std::cos(a));
      s[static_cast<std::size_t>(i)] = static_cast<double>(std::sin(a));
    }
  }
};

const ETable& etable() {
  static const ETable t;
  return t;
}

// Per-polynomial phases in 64-bit turns for n = 1..N, row-major by n.
struct PhaseTable {
  std::int64_t n = 0;
  std::size_t k = 0;
  std::vector<std::uint64_t> t;
  std::vector<long double> err_turns;  // kernel error per polynomial

  PhaseTable(const PolySystem& system, std::int64_t last) : n(last), k(system.k()) {
    if (last < 1) return;
    SystemStepper st(system, last);
    st.seek(1);
    t.resize(static_cast<std::size_t>(last) * k);
    for (std::int64_t m = 0; m < last; ++m, st.next())
      for (std::size_t i = 0; i < k; ++i)
        t[static_cast<std::size_t>(m) * k + i] = static_cast<std::uint64_t>(st.value(i) >> 64);
    for (std::size_t i = 0; i < k; ++i)
      err_turns.push_back(std::ldexp(static_cast<long double>(st.err()[i]), -128) + std::ldexp(1.0L, -64));
  }

  std::complex<double> sum(const FrequencyVector& h) const {
    const ETable& e = etable();
    const double scale = std::ldexp(2.0 * 3.14159265358979323846, -64);
    long double re = 0, im = 0;
    double bre = 0, bim = 0;
    std::vector<std::uint64_t> hu(k);
    for (std::size_t i = 0; i < k; ++i) hu[i] = static_cast<std::uint64_t>(h[i]);
    for (std::int64_t m = 0; m < n; ++m) {
      const std::uint64_t* row = &t[static_cast<std::size_t>(m) * k];
      std::uint64_t ph = 0;
      for (std::size_t i = 0; i < k; ++i) ph += hu[i] * row[i];
      auto idx = static_cast<std::size_t>(ph >> 52);
      double r = static_cast<double>(ph & ((std::uint64_t{1} << 52) - 1)) * scale;
      double r2 = r * r;
      double cd = 1.0 - r2 * (0.5 - r2 / 24.0);
      double sd = r * (1.0 - r2 * (1.0 / 6.0 - r2 / 120.0));
      bre += e.c[idx] * cd - e.s[idx] * sd;
      bim += e.s[idx] * cd + e.c[idx] * sd;
      if ((m & 1023) == 1023) {
        re += bre;
        im += bim;
        bre = bim = 0;
      }
    }
    re += bre;
    im += bim;
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  // Bound on the error of sum(h).
  long double margin(const FrequencyVector& h) const {
    long double ph = 0;
    for (std::size_t i = 0; i < k; ++i) ph += std::fabs(static_cast<long double>(h[i])) * err_turns[i];
    return static_cast<long double>(n) * (kTwoPi * ph + 1e-14L) + 1e-9L;
  }
};

long double piece_poly(long double t) {
  // Integral of the quadratic B-spline on [0, 3].
  if (t <= 0) return 0;
  if (t <= 1) return t * t * t / 6;
  if (t <= 2) return 0.5L - t * t * t / 3 + 1.5L * t * t - 1.5L * t;
  if (t < 3) return 1 - (3 - t) * (3 - t) * (3 - t) / 6;
  return 1;
}

// 8-point Gauss-Legendre on [a, b].
template <class F>
long double gauss8(F f, long double a, long double b) {
  static const long double x[4] = {0.1834346424956498049394761L, 0.5255324099163289858177390L,
                                   0.7966664774136267395915539L, 0.9602898564975362316835609L};
  static const long double w[4] = {0.3626837833783619829651504L, 0.3137066458778872873379622L,
                                   0.2223810344533744705443560L, 0.1012285362903762591525314L};
  long double m = (a + b) / 2, r = (b - a) / 2, s = 0;
  for (int i = 0; i < 4; ++i) s += w[i] * (f(m + r * x[i]) + f(m - r * x[i]));
  return s * r;
}

mpfr_prec_t work_prec(int precision_bits) { return static_cast<mpfr_prec_t>(precision_bits + 64); }

Real mpfr_to_real(mpfr_t v, const mpq_class& rad, int prec) {
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), v);
  return Real::ball(q, rad, prec);
}

mpq_class pow2q(long e) {
  mpq_class r(1);
  if (e >= 0) {
    mpz_class z = mpz_class(1) << e;
    r = mpq_class(z);
  } else {
    r = mpq_class(mpz_class(1), mpz_class(1) << (-e));
  }
  r.canonicalize();
  return r;
}

}  // namespace

long double WeylValue::modulus() const {
  long double a = re.to_long_double(), b = im.to_long_double();
  return std::sqrt(a * a + b * b);
}

WeylValue weyl_sum(const PolySystem& system, const FrequencyVector& h, const Real& x, int precision_bits) {
  system.validate();
  Poly p = combine(system, h);
  const std::int64_t last = floor_int(x);
  if (last < 1) throw PreconditionError("weyl_sum needs x >= 1");
  const int d = system.d;
  // Exact forward differences of the midpoint phase, kept reduced mod 1.
  std::vector<mpq_class> vals(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i) {
    mpq_class acc = 0, arg(1 + i);
    for (int j = d; j >= 1; --j) acc = (acc + p.coeffs[static_cast<std::size_t>(j - 1)].mid()) * arg;
    vals[static_cast<std::size_t>(i)] = acc;
  }
  for (int m = 1; m <= d; ++m)
    for (int i = d; i >= m; --i) vals[static_cast<std::size_t>(i)] -= vals[static_cast<std::size_t>(i - 1)];
  for (auto& v : vals) v -= mpq_class(floor_of(v));

  // Phase radius bound: sum_j rad_j n^j, grows with n.
  std::vector<double> rads;
  bool any_rad = false;
  for (const auto& c : p.coeffs) {
    rads.push_back(c.radius().get_d());
    if (sgn(c.radius()) > 0) any_rad = true;
  }

  // Exact rational phase: e(P(n)) has period lcm of the denominators.
  std::int64_t period = last;
  if (!any_rad) {
    mpz_class L = 1;
    for (const auto& cf : p.coeffs) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), cf.mid().get_den_mpz_t());
    if (L < last) period = L.get_si();
  }
  const std::int64_t reps = last / period, rem = last % period;

  const mpfr_prec_t wp = work_prec(precision_bits);
  mpfr_t re, im, t, s, c, twopi, re_rem, im_rem;
  mpfr_inits2(wp, re, im, t, s, c, twopi, re_rem, im_rem, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_zero(re_rem, 1);
  mpfr_set_zero(im_rem, 1);
  mpfr_set_zero(re, 1);
  mpfr_set_zero(im, 1);
  mpfr_const_pi(twopi, MPFR_RNDN);
  mpfr_mul_2ui(twopi, twopi, 1, MPFR_RNDN);
  long double phase_rad_sum = 0;
  for (std::int64_t n = 1; n <= period; ++n) {
    mpfr_set_q(t, vals[0].get_mpq_t(), MPFR_RNDN);
    mpfr_mul(t, t, twopi, MPFR_RNDN);
    mpfr_sin_cos(s, c, t, MPFR_RNDN);
    mpfr_add(re, re, c, MPFR_RNDN);
    mpfr_add(im, im, s, MPFR_RNDN);
    if (n == rem) {
      mpfr_set(re_rem, re, MPFR_RNDN);
      mpfr_set(im_rem, im, MPFR_RNDN);
    }
    if (any_rad) {
      long double pw = 1, r = 0;
      for (int j = 1; j <= d; ++j) {
        pw *= static_cast<long double>(n);
        r += rads[static_cast<std::size_t>(j - 1)] * pw;
      }
      phase_rad_sum += r;
    }
    for (int m = 0; m < d; ++m) {
      auto& v = vals[static_cast<std::size_t>(m)];
      v += vals[static_cast<std::size_t>(m) + 1];
      if (v >= 1) v -= mpq_class(floor_of(v));
    }
  }
  if (reps > 1 || rem > 0) {
    mpfr_mul_si(re, re, static_cast<long>(reps), MPFR_RNDN);
    mpfr_mul_si(im, im, static_cast<long>(reps), MPFR_RNDN);
    mpfr_add(re, re, re_rem, MPFR_RNDN);
    mpfr_add(im, im, im_rem, MPFR_RNDN);
  }
  // Rounding: each term a few ulps, each addition one ulp of a value <= N.
  mpq_class rad = pow2q(-static_cast<long>(wp) + 4) * mpq_class(mpz_class(static_cast<long>(last)) * (last + 8));
  if (any_rad) {
    mpq_class extra;
    mpfr_t tmp;
    mpfr_init2(tmp, 64);
    mpfr_set_ld(tmp, phase_rad_sum * kTwoPi * 1.001L, MPFR_RNDU);
    mpfr_get_q(extra.get_mpq_t(), tmp);
    mpfr_clear(tmp);
    rad += extra;
  }
  WeylValue out{mpfr_to_real(re, rad, precision_bits), mpfr_to_real(im, rad, precision_bits)};
  mpfr_clears(re, im, t, s, c, twopi, re_rem, im_rem, static_cast<mpfr_ptr>(nullptr));
  return out;
}

std::complex<double> weyl_sum_fast(const PolySystem& system, const FrequencyVector& h, const Real& x) {
  system.validate();
  if (h.size() != system.k()) throw ShapeMismatch("frequency vector length differs from k");
  PhaseTable table(system, floor_int(x));
  return table.sum(h);
}

long double phi(long double u) {
  u = std::fabs(u);
  if (u <= 0.5L) return 1;
  if (u >= 1) return 0;
  long double v = 1 - piece_poly(3 * 2 * (u - 0.5L));
  return std::clamp(v, 0.0L, 1.0L);
}

long double phi_hat(long double xi) {
  long double plateau;
  if (std::fabs(xi) < 1e-12L) {
    plateau = 0.5L;
  } else {
    plateau = std::sin(kTwoPi * xi / 2) / (kTwoPi * xi);  // int_0^{1/2} cos(2 pi u xi) du
  }
  auto f = [xi](long double u) { return phi(u) * std::cos(kTwoPi * u * xi); };
  const long double knots[4] = {0.5L, 2.0L / 3, 5.0L / 6, 1.0L};
  int sub = std::max(1, static_cast<int>(std::ceil(std::fabs(xi) / 2)));
  long double tail = 0;
  for (int p = 0; p < 3; ++p) {
    long double a = knots[p], b = knots[p + 1], h = (b - a) / sub;
    for (int s = 0; s < sub; ++s) tail += gauss8(f, a + s * h, a + (s + 1) * h);
  }
  return 2 * (plateau + tail);
}

namespace {

enum class Zone { Inner, Partial, Outer, Unsure };

Zone classify(u128 dist, u128 err, const TurnBound& half, const TurnBound& full) {
  Cmp c = certified_less(dist, err, full);
  if (c == Cmp::NotLess) return Zone::Outer;
  u128 hs = err + half.err;
  if (dist + hs < half.value) return Zone::Inner;
  if (c == Cmp::Less && dist > half.value + hs) return Zone::Partial;
  return Zone::Unsure;
}

Zone classify_exact(const Real& dist, const Real& eps) {
  Real half = eps / Real(2);
  if (eps.certainly_leq(dist)) return Zone::Outer;
  if (dist.certainly_leq(half)) return Zone::Inner;
  if (half.certainly_less(dist) && dist.certainly_less(eps)) return Zone::Partial;
  throw PrecisionError("smoothing weight undecidable at the working precision");
}

}  // namespace

SmoothedCount smoothed_count(const PolySystem& system, const Epsilons& eps, const Real& x,
                             const SmoothingKernel& /*kernel*/, std::int64_t enum_cap) {
  system.validate();
  if (eps.size() != system.k()) throw ShapeMismatch("eps count differs from the number of polynomials");
  if (x.mid() < 2) throw PreconditionError("smoothed_count needs x >= 2");
  const std::int64_t last = floor_int(x);
  if (last > enum_cap) throw CapExceeded("smoothed count range exceeds the enumeration cap");
  SystemStepper st(system, last);
  st.seek(1);
  std::vector<TurnBound> half, full;
  std::vector<long double> eps_ld;
  for (const auto& e : eps.values()) {
    half.push_back(to_turn_bound(e / Real(2)));
    full.push_back(to_turn_bound(e));
    eps_ld.push_back(e.to_long_double());
  }
  SmoothedCount out;
  long double partial_sum = 0;
  const std::size_t k = system.k();
  for (std::int64_t n = 1; n <= last; ++n, st.next()) {
    bool outer = false, all_inner = true;
    long double prod = 1;
    std::vector<Real> exact;
    for (std::size_t i = 0; i < k && !outer; ++i) {
      u128 dt = turns_dist(st.value(i));
      Zone z = classify(dt, st.err()[i], half[i], full[i]);
      long double dist = turns_to_ld(dt);
      if (z == Zone::Unsure) {
        if (exact.empty()) exact = eval_system(system, n);
        z = classify_exact(exact[i], eps[i]);
        dist = exact[i].to_long_double();
      }
      if (z == Zone::Outer) {
        outer = true;
      } else if (z == Zone::Partial) {
        all_inner = false;
        prod *= phi(dist / eps_ld[i]);
      }
    }
    if (outer) continue;
    if (all_inner) {
      ++out.inner;
    } else {
      ++out.partial;
      partial_sum += prod;
    }
  }
  partial_sum = std::clamp(partial_sum, 0.0L, static_cast<long double>(out.partial));
  out.value = Real::from_long_double(static_cast<long double>(out.inner) + partial_sum);
  return out;
}

long double smoothed_count_fourier(const PolySystem& system, const Epsilons& eps, const Real& x,
                                   const SmoothingKernel& kernel) {
  system.validate();
  const std::size_t k = system.k();
  std::vector<long> cut;
  std::vector<std::vector<long double>> w(k);
  for (std::size_t i = 0; i < k; ++i) {
    long double e = eps[i].to_long_double();
    long c = static_cast<long>(std::ceil(kernel.fourier_tail_cut / e));
    cut.push_back(c);
    for (long h = -c; h <= c; ++h) w[i].push_back(e * phi_hat(e * static_cast<long double>(h)));
  }
  PhaseTable table(system, floor_int(x));
  FrequencyVector h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = -cut[i];
  long double total = 0;
  while (true) {
    long double weight = 1;
    for (std::size_t i = 0; i < k; ++i) weight *= w[i][static_cast<std::size_t>(h[i] + cut[i])];
    total += weight * table.sum(h).real();
    std::size_t i = 0;
    while (i < k && h[i] == cut[i]) {
      h[i] = -cut[i];
      ++i;
    }
    if (i == k) break;
    ++h[i];
  }
  return total;
}

std::vector<long> h_caps(const Epsilons& eps) {
  const std::size_t k = eps.size();
  mpfr_t delta, e, p;
  mpfr_inits2(256, delta, e, p, static_cast<mpfr_ptr>(nullptr));
  Real dp = eps.delta_product();
  mpfr_set_q(delta, dp.mid().get_mpq_t(), MPFR_RNDN);
  double expo = -1.0 / std::pow(2.0 * static_cast<double>(k), 4.0);
  mpfr_set_d(p, expo, MPFR_RNDN);
  mpfr_pow(delta, delta, p, MPFR_RNDN);  // Delta^(-1/(2k)^4)
  std::vector<long> caps;
  for (std::size_t i = 0; i < k; ++i) {
    mpfr_set_q(e, eps[i].mid().get_mpq_t(), MPFR_RNDN);
    mpfr_div(e, delta, e, MPFR_RNDN);
    mpfr_floor(e, e);
    caps.push_back(mpfr_get_si(e, MPFR_RNDN));
  }
  mpfr_clears(delta, e, p, static_cast<mpfr_ptr>(nullptr));
  return caps;
}

int dyadic_class(const WeylValue& s, const Real& x) {
  Real m2 = s.modulus_sq();
  mpq_class b = x.mid();
  for (int j = 1; j <= 62; ++j) {
    b /= 2;
    if (!m2.certainly_less(Real(mpq_class(b * b)))) return j;
  }
  return -1;
}

bool in_dyadic_window(const WeylValue& s, const Real& x, int j) {
  if (j < 1) return false;
  Real m2 = s.modulus_sq();
  mpq_class lo = x.mid() * pow2q(-j), hi = lo * 2;
  return !m2.certainly_less(Real(mpq_class(lo * lo))) && !Real(mpq_class(hi * hi)).certainly_less(m2);
}

FourierDichotomy large_coefficients(const PolySystem& system, const Epsilons& eps, const Real& x,
                                    const Real& c_hit, std::int64_t max_box, std::int64_t enum_cap) {
  system.validate();
  const std::size_t k = system.k();
  if (eps.size() != k) throw ShapeMismatch("eps count differs from the number of polynomials");
  Real delta = eps.delta_product();
  if (delta.lower() > mpq_class(1, 4)) throw PreconditionError("large_coefficients needs Delta <= 1/4");
  FourierDichotomy out;
  out.h_cap = h_caps(eps);
  long double box = 1;
  for (long c : out.h_cap) box *= static_cast<long double>(2 * c + 1);
  out.box_size = box > 9e18L ? INT64_MAX : static_cast<std::int64_t>(box);

  const std::int64_t last = floor_int(x);
  out.density_count = hit_count(system, eps, x, enum_cap);
  mpq_class threshold = c_hit.mid() * delta.mid() * mpq_class(last);
  if (mpq_class(out.density_count) >= threshold) {
    out.branch = Branch::HitDensity;
    return out;
  }
  out.branch = Branch::LargeCoefficients;
  if (box > static_cast<long double>(max_box))
    throw CapExceeded("h-box of " + std::to_string(out.box_size) + " vectors exceeds the cap " +
                      std::to_string(max_box));

  PhaseTable table(system, last);
  const long double xl = x.to_long_double();
  std::map<int, std::vector<Witness>> classes;
  long double best_mod = -1;
  Witness best;
  FrequencyVector h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = -out.h_cap[i];
  auto advance = [&]() {
    std::size_t i = 0;
    while (i < k && h[i] == out.h_cap[i]) {
      h[i] = -out.h_cap[i];
      ++i;
    }
    if (i == k) return false;
    ++h[i];
    return true;
  };
  do {
    // Canonical representative: first nonzero entry positive.
    auto nz = std::find_if(h.begin(), h.end(), [](long v) { return v != 0; });
    if (nz == h.end() || *nz < 0) continue;
    std::complex<double> s = table.sum(h);
    long double m = std::hypot(static_cast<long double>(s.real()), static_cast<long double>(s.imag()));
    long double margin = table.margin(h);
    int j = -1;
    bool precise = false;
    // |S| <= x always, so the top edge of the first window needs no care.
    m = std::min(m, xl);
    long double b = xl;
    for (int jj = 1; jj <= 62; ++jj) {
      b /= 2;
      if (std::fabs(m - b) <= margin) {
        precise = true;
        break;
      }
      if (m > b) {
        j = jj;
        break;
      }
    }
    Real modulus = Real::from_long_double(m);
    if (precise) {
      WeylValue w = weyl_sum(system, h, x);
      j = dyadic_class(w, x);
      m = w.modulus();
      modulus = Real::from_long_double(m);
    }
    FrequencyVector neg(h);
    for (auto& v : neg) v = -v;
    if (m > best_mod) {
      best_mod = m;
      best = {h, modulus};
    }
    if (j < 0) continue;
    classes[j].push_back({h, modulus});
    classes[j].push_back({neg, modulus});
  } while (advance());

  int chosen = -1;
  for (const auto& [j, members] : classes) {
    auto need = static_cast<std::size_t>(std::ceil(std::sqrt(std::ldexp(1.0L, j)) - 1e-12L));
    if (members.size() >= need) {
      chosen = j;
      break;
    }
  }
  if (chosen < 0) {
    out.threshold_met = false;
    std::size_t most = 0;
    for (const auto& [j, members] : classes)
      if (members.size() > most) {
        most = members.size();
        chosen = j;
      }
  }
  if (chosen < 0) {
    out.threshold_met = false;
    out.Q = std::int64_t{1} << 62;
    out.witnesses.push_back(best);
    return out;
  }
  out.Q = std::int64_t{1} << chosen;
  out.witnesses = classes[chosen];
  std::sort(out.witnesses.begin(), out.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.h < b.h; });
  return out;
}

WeylBoundReport verify_weyl_bound(const Poly& f, const Real& alpha, long a, long q, const Real& x,
                                  const Real& q_decl, long double c_d, long double c_check) {
  if (q < 1 || std::gcd(a, q) != 1) throw PreconditionError("invalid approximation: need q >= 1 and gcd(a, q) = 1");
  if (q_decl.mid() < q) throw PreconditionError("invalid approximation: declared Q is below q");
  Real gap = (alpha - Real(mpq_class(a, q))).abs();
  Real allowed = Real(1) / (Real(q) * q_decl);
  if (allowed.certainly_less(gap)) throw PreconditionError("invalid approximation: |alpha - a/q| > 1/(qQ)");
  PolySystem s;
  s.d = f.degree_bound();
  Poly scaled;
  int deg = 0;
  for (int j = 1; j <= s.d; ++j) {
    const Real& c = f.coeffs[static_cast<std::size_t>(j - 1)];
    scaled.coeffs.push_back(c * alpha);
    if (!c.is_zero()) deg = j;
  }
  if (deg == 0) throw PreconditionError("polynomial must be nonzero");
  s.polys.push_back(scaled);
  WeylBoundReport r;
  r.lhs = weyl_sum(s, {1}, x, 128).modulus();
  long double xl = x.to_long_double(), ql = static_cast<long double>(q);
  r.rhs = c_check * (xl / std::pow(ql, c_d) + xl / std::pow(std::pow(xl, static_cast<long double>(deg)) / ql, c_d));
  r.pass = r.lhs <= r.rhs;
  return r;
}

}  // namespace fracparts
