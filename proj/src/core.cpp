#include "fracparts/core.hpp"

#include <algorithm>

#include "fracparts/turns.hpp"

namespace fracparts {

bool Poly::is_exact() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Real& c) { return c.is_exact(); });
}

void PolySystem::validate() const {
  if (d < 1) throw PreconditionError("degree bound d must be at least 1");
  if (polys.empty()) throw PreconditionError("a system needs at least one polynomial");
  for (const auto& p : polys)
    if (p.degree_bound() != d) throw PreconditionError("every polynomial needs exactly d coefficients");
}

Epsilons::Epsilons(std::vector<Real> eps) : eps_(std::move(eps)) {
  for (const auto& e : eps_) {
    if (!e.certainly_positive() || e.upper() > mpq_class(1, 2))
      throw PreconditionError("each eps must lie in (0, 1/2], got " + e.to_string());
  }
}

Real Epsilons::delta_product() const {
  Real p(1);
  for (const auto& e : eps_) p *= e;
  return p;
}

bool Epsilons::outside_hypothesis() const {
  return std::any_of(eps_.begin(), eps_.end(), [](const Real& e) { return e.upper() > mpq_class(1, 100); });
}

void SystemState::validate() const {
  system.validate();
  if (eps.size() != system.k()) throw ShapeMismatch("eps count differs from the number of polynomials");
  if (!(y.lower() > 1)) throw PreconditionError("horizon must exceed 1");
}

Real eval_poly(const Poly& p, const mpz_class& n) {
  Real acc(0);
  Real arg(mpq_class{n});
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    acc += *it;
    acc *= arg;
  }
  return acc;
}

std::vector<Real> eval_system(const PolySystem& system, std::int64_t n) {
  std::vector<Real> out;
  out.reserve(system.k());
  mpz_class nz(static_cast<long>(n));
  for (const auto& p : system.polys) out.push_back(frac_dist(eval_poly(p, nz)));
  return out;
}

namespace {

// Larger of two balls by midpoint, radius kept conservative.
Real ball_max(const Real& a, const Real& b) { return b.mid() > a.mid() ? b : a; }

void check_cap(std::int64_t n, std::int64_t cap) {
  if (n > cap)
    throw CapExceeded("scan of " + std::to_string(n) + " values exceeds the enumeration cap " + std::to_string(cap));
}

// Same as meets_all but through the kernel, with exact fallback.
class HitTester {
 public:
  HitTester(const PolySystem& s, const Epsilons& eps) : system_(s), eps_(eps) {
    for (const auto& e : eps.values()) bounds_.push_back(to_turn_bound(e));
  }
  bool test(const SystemStepper& st) const {
    bool unsure = false;
    for (std::size_t i = 0; i < st.size(); ++i) {
      Cmp c = certified_less(turns_dist(st.value(i)), st.err()[i], bounds_[i]);
      if (c == Cmp::NotLess) return false;
      if (c == Cmp::Unsure) unsure = true;
    }
    return unsure ? meets_all(system_, eps_, st.position()) : true;
  }

 private:
  const PolySystem& system_;
  const Epsilons& eps_;
  std::vector<TurnBound> bounds_;
};

}  // namespace

Real max_dist(const PolySystem& system, std::int64_t n) {
  auto d = eval_system(system, n);
  Real m = d.front();
  for (std::size_t i = 1; i < d.size(); ++i) m = ball_max(m, d[i]);
  return m;
}

bool meets_all(const PolySystem& system, const Epsilons& eps, std::int64_t n) {
  auto dists = eval_system(system, n);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].certainly_less(eps[i])) continue;
    if (eps[i].certainly_leq(dists[i])) return false;
    throw PrecisionError("cannot decide |f_" + std::to_string(i + 1) + "(" + std::to_string(n) +
                         ")| < eps at the working precision");
  }
  return true;
}

MinResult brute_force_min(const PolySystem& system, const Real& x, std::int64_t enum_cap) {
  system.validate();
  if (x.mid() < 2) throw PreconditionError("brute_force_min needs x >= 2");
  const std::int64_t last = largest_below(x);
  check_cap(last, enum_cap);
  SystemStepper st(system, last);
  st.seek(1);
  const u128 e2 = st.max_err() * 2;
  std::int64_t best_n = 0;
  u128 best_m = 0;
  std::optional<Real> best_exact;
  for (std::int64_t n = 1; n <= last; ++n, st.next()) {
    u128 m = 0;
    for (std::size_t i = 0; i < st.size(); ++i) m = std::max(m, turns_dist(st.value(i)));
    if (best_n == 0 || m + e2 < best_m) {
      best_n = n;
      best_m = m;
      best_exact.reset();
      continue;
    }
    if (m > best_m + e2) continue;
    if (!best_exact) best_exact = max_dist(system, best_n);
    Real v = max_dist(system, n);
    bool better = v.certainly_less(*best_exact) ||
                  (!(v.is_exact() && best_exact->is_exact()) && !best_exact->certainly_leq(v) &&
                   v.mid() < best_exact->mid());
    if (better) {
      best_n = n;
      best_m = m;
      best_exact = v;
    }
  }
  return {best_n, best_exact ? *best_exact : max_dist(system, best_n)};
}

std::int64_t hit_count(const PolySystem& system, const Epsilons& eps, const Real& x, std::int64_t enum_cap) {
  system.validate();
  if (eps.size() != system.k()) throw ShapeMismatch("eps count differs from the number of polynomials");
  const std::int64_t last = floor_int(x);
  if (last < 1) return 0;
  check_cap(last, enum_cap);
  SystemStepper st(system, last);
  st.seek(1);
  HitTester tester(system, eps);
  std::int64_t count = 0;
  for (std::int64_t n = 1; n <= last; ++n, st.next())
    if (tester.test(st)) ++count;
  return count;
}

std::optional<std::int64_t> first_hit(const PolySystem& system, const Epsilons& eps, const Real& x,
                                      std::int64_t enum_cap) {
  system.validate();
  if (eps.size() != system.k()) throw ShapeMismatch("eps count differs from the number of polynomials");
  const std::int64_t last = largest_below(x);
  if (last < 1) return std::nullopt;
  check_cap(last, enum_cap);
  SystemStepper st(system, last);
  st.seek(1);
  HitTester tester(system, eps);
  for (std::int64_t n = 1; n <= last; ++n, st.next())
    if (tester.test(st)) return n;
  return std::nullopt;
}

std::vector<long double> running_min(const PolySystem& system, const std::vector<std::int64_t>& checkpoints,
                                     std::int64_t enum_cap) {
  system.validate();
  if (checkpoints.empty()) return {};
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < 2)
    throw PreconditionError("checkpoints must be ascending and at least 2");
  const std::int64_t last = checkpoints.back() - 1;
  check_cap(last, enum_cap);
  SystemStepper st(system, last);
  st.seek(1);
  std::vector<long double> out;
  u128 best = ~static_cast<u128>(0);
  std::size_t next_cp = 0;
  for (std::int64_t n = 1; n <= last; ++n, st.next()) {
    u128 m = 0;
    for (std::size_t i = 0; i < st.size(); ++i) m = std::max(m, turns_dist(st.value(i)));
    best = std::min(best, m);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] - 1 == n) {
      out.push_back(turns_to_ld(best));
      ++next_cp;
    }
  }
  return out;
}

}  // namespace fracparts
