#include "fracparts/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "fracparts/serialize.hpp"

namespace fracparts {

namespace {

long double log_z(const mpz_class& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(static_cast<long double>(std::fabs(m))) + static_cast<long double>(e) * std::log(2.0L);
}

long double log_q(const mpq_class& q) { return log_z(q.get_num()) - log_z(q.get_den()); }

mpz_class zpow(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// q^c, exact when c is an exact nonnegative integer.
Real real_pow(const mpz_class& q, const Real& c) {
  if (c.is_exact() && c.mid().get_den() == 1 && c.mid() >= 0 && c.mid().get_num().fits_ulong_p())
    return Real(mpq_class(zpow(q, c.mid().get_num().get_ui())));
  return Real::from_long_double(std::exp(c.to_long_double() * log_z(q)));
}

mpq_class col_inf_norm(const IntMatrix& m, std::size_t c) {
  mpz_class best = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (abs(m(r, c)) > best) best = abs(m(r, c));
  return mpq_class(best);
}

// Columns of the largest |r x r minor| of h (r x k), ties to the lexicographically first.
std::vector<std::size_t> best_minor_columns(const IntMatrix& h) {
  const std::size_t r = h.rows(), k = h.cols();
  std::vector<std::size_t> idx(r), best;
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  mpz_class best_det = 0;
  while (true) {
    IntMatrix m(r, r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) m(a, b) = h(a, idx[b]);
    mpz_class d = abs(determinant(m));
    if (d > best_det) {
      best_det = d;
      best = idx;
    }
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == k - r + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (best_det == 0) throw SingularMatrix("generators are linearly dependent");
  return best;
}

}  // namespace

Real default_delta_const(std::size_t k, int d) {
  long s = static_cast<long>(k) + d;
  return Real(mpq_class(1, 16 * s * s));
}

ReductionStep reduce_dimension(const SystemState& state, const GeneratorSet& gens, const mpz_class& q0,
                               const Real& c_cfg, const Real& delta_const) {
  state.validate();
  const PolySystem& f = state.system;
  const std::size_t k = f.k(), r = gens.r;
  const int d = f.d;
  if (r < 1 || r >= k) throw PreconditionError("reduction needs 1 <= r < k");
  if (gens.h_vecs.size() != r || gens.a_vecs.size() != r) throw ShapeMismatch("generator set is inconsistent");
  if (q0 < 1) throw PreconditionError("q0 must be positive");
  if (!delta_const.certainly_positive() || !delta_const.certainly_less(Real(1)))
    throw PreconditionError("delta_const must lie in (0, 1)");

  // Relations are on beta = q0 f.
  PolySystem beta = f;
  for (auto& p : beta.polys)
    for (auto& c : p.coeffs) c = c * Real(mpq_class(q0));
  for (std::size_t l = 0; l < r; ++l)
    if (!in_region(beta, gens.B, gens.eta, gens.h_vecs[l], gens.a_vecs[l]))
      throw PreconditionError("generator " + std::to_string(l) + " is not a certified relation for q0 * f");
  if (log_q(gens.eta) >= c_cfg.to_long_double() * log_z(q0) - std::log(state.y.to_long_double()))
    throw PreconditionError("eta must be below q0^C / x");

  ReductionStep st;
  st.k = k;
  st.r = r;
  st.k_prime = k - r;
  st.q0 = q0;
  st.delta_const = delta_const;
  st.c_cfg = c_cfg;
  st.parent_digest = state_digest(state);
  st.tilde_product = gens.tilde_product;

  IntMatrix h(r, k);
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t i = 0; i < k; ++i) h(l, i) = gens.h_vecs[l][i];
  std::vector<std::size_t> lead = best_minor_columns(h);
  st.perm = lead;
  for (std::size_t i = 0; i < k; ++i)
    if (std::find(lead.begin(), lead.end(), i) == lead.end()) st.perm.push_back(i);

  st.H = IntMatrix(r, k);
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t t = 0; t < k; ++t) st.H(l, t) = h(l, st.perm[t]);
  st.a_vecs = gens.a_vecs;
  for (std::size_t t = 0; t < k; ++t) st.B_lat.push_back(gens.B[st.perm[t]]);

  IntMatrix H1(r, r), H2(r, k - r);
  for (std::size_t l = 0; l < r; ++l) {
    for (std::size_t t = 0; t < r; ++t) H1(l, t) = st.H(l, t);
    for (std::size_t t = r; t < k; ++t) H2(l, t - r) = st.H(l, t);
  }
  SublatticeReport rep = sublattice_determinants(H1, H2);
  if (!rep.identity_holds) throw Error("sublattice determinant identity failed");
  st.D1 = rep.det1;
  st.D2 = rep.det2;
  st.Z = lll_reduce_rows(rep.kernel.transpose()).basis.transpose();
  if (abs(determinant(st.Z)) * st.D2 != st.D1) throw Error("solution lattice determinant mismatch");

  // b' per slot j: T w = t, b' = U[:, :r] w.
  const IntMatrix& T = rep.triangular;
  const IntMatrix& U = rep.transform;
  st.b_prime.assign(k, std::vector<mpz_class>(static_cast<std::size_t>(d)));
  for (int j = 1; j <= d; ++j) {
    mpz_class scale = zpow(st.D2, static_cast<unsigned long>(j)) * zpow(q0, static_cast<unsigned long>(j - 1));
    std::vector<mpz_class> t(r), w(r);
    for (std::size_t l = 0; l < r; ++l) t[l] = scale * gens.a_vecs[l][static_cast<std::size_t>(j - 1)];
    for (std::size_t a = 0; a < r; ++a) {
      mpz_class rest = t[a];
      for (std::size_t b = 0; b < a; ++b) rest -= T(a, b) * w[b];
      if (!mpz_divisible_p(rest.get_mpz_t(), T(a, a).get_mpz_t()))
        throw IntegralityFailure("no integer b' for slot " + std::to_string(j));
      w[a] = rest / T(a, a);
    }
    for (std::size_t i = 0; i < k; ++i) {
      mpz_class v = 0;
      for (std::size_t a = 0; a < r; ++a) v += U(i, a) * w[a];
      st.b_prime[i][static_cast<std::size_t>(j - 1)] = v;
    }
    for (std::size_t l = 0; l < r; ++l) {
      mpz_class v = 0;
      for (std::size_t i = 0; i < k; ++i) v += st.H(l, i) * st.b_prime[i][static_cast<std::size_t>(j - 1)];
      if (v != t[l]) throw IntegralityFailure("b' does not reproduce the relation right side");
    }
  }

  st.g = build_reduced_system(f, st.perm, r, st.b_prime, st.Z, st.D2, q0);
  st.eps_prime = build_reduced_eps(state.eps, st.perm, r, st.Z, delta_const);
  st.eta = gens.eta;
  st.min_h_tilde = inf_norm(gens.h_tilde.front());
  for (const auto& v : gens.h_tilde) st.min_h_tilde = std::min(st.min_h_tilde, inf_norm(v));
  st.y = build_reduced_horizon(state.y, delta_const, st.min_h_tilde, q0, c_cfg, st.D2);
  if (!st.y.certainly_less(state.y)) throw DegenerateHorizon("reduced horizon is not below the parent's");
  if (!Real(1).certainly_less(st.y)) throw DegenerateHorizon("reduced horizon y <= 1");
  return st;
}

PolySystem build_reduced_system(const PolySystem& f, const std::vector<std::size_t>& perm, std::size_t r,
                                const std::vector<std::vector<mpz_class>>& b_prime, const IntMatrix& Z,
                                const mpz_class& D2, const mpz_class& q0) {
  const std::size_t k = f.k(), kp = k - r;
  const int d = f.d;
  if (perm.size() != k || b_prime.size() != k || Z.rows() != kp || Z.cols() != kp)
    throw ShapeMismatch("reduced system: inconsistent shapes");
  const mpz_class m = D2 * q0;
  std::vector<std::vector<Real>> ft(kp, std::vector<Real>(static_cast<std::size_t>(d)));
  for (std::size_t t = 0; t < kp; ++t)
    for (int j = 1; j <= d; ++j) {
      std::size_t jj = static_cast<std::size_t>(j - 1);
      ft[t][jj] = f.coeff(perm[r + t], j) * Real(mpq_class(zpow(m, static_cast<unsigned long>(j)))) -
                  Real(mpq_class(b_prime[r + t][jj]));
    }
  RatMatrix zinv = inverse(to_rational(Z));
  PolySystem g;
  g.d = d;
  for (std::size_t a = 0; a < kp; ++a) {
    Poly p;
    for (int j = 1; j <= d; ++j) {
      Real s(0);
      for (std::size_t b = 0; b < kp; ++b)
        if (zinv(a, b) != 0) s = s + Real(zinv(a, b)) * ft[b][static_cast<std::size_t>(j - 1)];
      p.coeffs.push_back(s);
    }
    g.polys.push_back(std::move(p));
  }
  return g;
}

Epsilons build_reduced_eps(const Epsilons& eps, const std::vector<std::size_t>& perm, std::size_t r,
                           const IntMatrix& Z, const Real& delta_const) {
  std::vector<Real> ep;
  for (std::size_t a = 0; a < Z.cols(); ++a)
    ep.push_back(delta_const * delta_const * eps[perm[r + a]] / Real(col_inf_norm(Z, a)));
  return Epsilons(ep);
}

Real build_reduced_horizon(const Real& x, const Real& delta_const, const mpq_class& min_h_tilde, const mpz_class& q0,
                           const Real& c_cfg, const mpz_class& D2) {
  return delta_const * x * Real(min_h_tilde) / (real_pow(q0, c_cfg + Real(1)) * Real(mpq_class(D2)));
}

LiftResult lift_solution(const ReductionStep& step, std::int64_t n_prime, const SystemState& parent) {
  if (n_prime < 1 || !Real(n_prime).certainly_less(step.y))
    throw PreconditionError("n' must satisfy 1 <= n' < y");
  if (!meets_all(step.g, step.eps_prime, n_prime)) throw PreconditionError("n' does not meet the reduced targets");
  mpz_class n = mpz_class(n_prime) * step.q0 * step.D2;
  if (!n.fits_slong_p() || !Real(mpq_class(n)).certainly_less(parent.y))
    throw HorizonOverflow("lifted n = " + n.get_str() + " is not below the parent horizon");
  LiftResult out;
  out.n = n.get_si();
  out.dists = eval_system(parent.system, out.n);
  for (std::size_t i = 0; i < out.dists.size(); ++i) {
    if (!out.dists[i].certainly_less(parent.eps[i])) {
      double excess = mpq_class(out.dists[i].mid() - parent.eps[i].mid()).get_d();
      throw LiftVerificationFailure("lifted n = " + std::to_string(out.n) + " misses target " + std::to_string(i),
                                    i, excess);
    }
  }
  return out;
}

DensityReport density_invariant(const SystemState& parent, const ReductionStep& step, const Real& c_cfg) {
  DensityReport rep;
  const long double C = c_cfg.to_long_double();
  const long double k = static_cast<long double>(parent.k());
  const long double kp = static_cast<long double>(step.k_prime);
  rep.E = 3 * C * C - C * C / (k * k * k) - C * C / (k * k * k * k);
  rep.E_prime = 3 * C * C - C * C / (kp * kp * kp);

  long double log_prod_b = 0, log_prod_bp = 0;
  for (const auto& e : parent.eps.values()) log_prod_b -= log_q(e.mid());
  for (const auto& e : step.eps_prime.values()) log_prod_bp -= log_q(e.mid());
  rep.log_lhs = log_q(step.y.mid()) - rep.E_prime * log_prod_bp;
  rep.log_rhs = log_q(parent.y.mid()) - rep.E * log_prod_b;
  rep.log_ratio = rep.log_lhs - rep.log_rhs;
  rep.ratio = std::exp(rep.log_ratio);

  // 1/C_impl = delta^(1 + 2k'E') m / (q0^(C+1) (A T gamma)^E'), from the
  // LLL product bound on Z, Hadamard on H1, and P^(E - E') >= 1.
  const long double alpha = 1 / (0.99L - 0.25L);
  const long double r = static_cast<long double>(step.r);
  long double log_a = kp * (kp - 1) / 4 * std::log(alpha) + r / 2 * std::log(r);
  long double log_gamma = 0;
  for (std::size_t t = 0; t < step.k; ++t) {
    long double v = log_q(step.B_lat[t]) + log_q(parent.eps[step.perm[t]].mid());
    if (v > 0) log_gamma += v;
  }
  long double log_inv = (1 + 2 * kp * rep.E_prime) * log_q(step.delta_const.mid()) + log_q(step.min_h_tilde) -
                        (C + 1) * log_z(step.q0) -
                        rep.E_prime * (log_a + log_q(step.tilde_product) + log_gamma);
  rep.log_c_impl = -log_inv;
  rep.c_impl = std::exp(rep.log_c_impl);
  long double slack = 1e-12L * (1 + std::fabs(rep.log_rhs));
  rep.pass = std::isfinite(rep.log_ratio) && rep.log_ratio + rep.log_c_impl >= -slack;
  return rep;
}

}  // namespace fracparts
