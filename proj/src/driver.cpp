#include "fracparts/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace fracparts {

// ---------------------------------------------------------------- config

void SolverConfig::validate() const {
  if (!c_hit.certainly_positive()) throw PreconditionError("c_hit must be positive");
  if (!c_cfg.certainly_positive()) throw PreconditionError("C must be positive");
  if (!c_orth.certainly_positive() || Real(1).certainly_less(c_orth))
    throw PreconditionError("c_orth must lie in (0, 1]");
  if (!delta_const.is_zero() && (!delta_const.certainly_positive() || !delta_const.certainly_less(Real(1))))
    throw PreconditionError("delta_const must lie in (0, 1)");
  if (brute_force_threshold < 1) throw PreconditionError("brute_force_threshold must be at least 1");
  if (max_depth < 0) throw PreconditionError("max_depth must be nonnegative");
  if (enum_cap < 1 || max_box < 1) throw PreconditionError("caps must be positive");
  if (precision_bits < 64) throw PreconditionError("precision_bits must be at least 64");
}

Json config_to_json(const SolverConfig& c) {
  return Json{{"c_hit", real_to_json(c.c_hit)},
              {"C", real_to_json(c.c_cfg)},
              {"c_orth", real_to_json(c.c_orth)},
              {"delta_const", real_to_json(c.delta_const)},
              {"tol_rel", real_to_json(c.tol_rel)},
              {"precision_bits", c.precision_bits},
              {"enum_cap", c.enum_cap},
              {"max_depth", c.max_depth},
              {"brute_force_threshold", c.brute_force_threshold},
              {"max_box", c.max_box},
              {"q_rel", c.q_rel},
              {"seed", c.seed}};
}

SolverConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("config: expected an object");
  SolverConfig c;
  auto real = [&](const char* key, Real& dst) {
    if (j.contains(key)) dst = real_from_json(j[key], key);
  };
  auto integer = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      if (j[key].is_number()) {
        // accept 1e8 style values when they are integral
        double v = j[key].get<double>();
        if (v == std::floor(v)) {
          dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
          return;
        }
      }
      throw ParseError(std::string(key) + ": expected an integer");
    }
    dst = j[key].get<std::remove_reference_t<decltype(dst)>>();
  };
  real("c_hit", c.c_hit);
  real("C", c.c_cfg);
  real("c_orth", c.c_orth);
  real("delta_const", c.delta_const);
  real("tol_rel", c.tol_rel);
  integer("precision_bits", c.precision_bits);
  integer("enum_cap", c.enum_cap);
  integer("max_depth", c.max_depth);
  integer("brute_force_threshold", c.brute_force_threshold);
  integer("max_box", c.max_box);
  integer("q_rel", c.q_rel);
  integer("seed", c.seed);
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

std::string status_name(Status s) {
  switch (s) {
    case Status::Found: return "Found";
    case Status::NotFound: return "NotFound";
    default: return "Inconclusive";
  }
}

// ---------------------------------------------------------------- solve

namespace {

struct LevelResult {
  std::optional<std::int64_t> n;
  bool exhaustive = false;  // no solution exists below the horizon
  std::string reason;
};

long double log_real(const Real& v) { return std::log(v.to_long_double()); }

mpz_class lcm_all(const std::vector<mpz_class>& v) {
  mpz_class l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_mpz_t());
  return l;
}

mpq_class ceil_dyadic(long double v, int bits) {
  long double scaled = std::ceil(std::ldexp(v, bits));
  mpz_class num;
  mpz_set_d(num.get_mpz_t(), static_cast<double>(scaled));
  if (static_cast<long double>(static_cast<double>(scaled)) < scaled) num += 1;
  return mpq_class(num, mpz_class(1) << bits);
}

class Solver {
 public:
  Solver(const SolverConfig& cfg, Certificate& cert, SolveStats& stats) : cfg_(cfg), cert_(cert), stats_(stats) {}

  LevelResult level(const SystemState& state, int depth, std::vector<ChainLink>& chain) {
    const std::int64_t last = largest_below(state.y);
    std::string tag = "depth " + std::to_string(depth) + " k=" + std::to_string(state.k()) + ": ";
    if (last <= cfg_.brute_force_threshold) {
      cert_.branches.push_back(tag + "brute force below threshold");
      return scan(state);
    }

    const Real delta = state.eps.delta_product();
    long double gate_lhs = -log_real(delta), gate_rhs = 2 / cfg_.c_cfg.to_long_double() * log_real(state.y);
    std::string gate = gate_lhs <= gate_rhs ? " (gate held)" : " (gate not held)";

    FourierDichotomy dich;
    try {
      ++stats_.fourier_calls;
      dich = large_coefficients(state.system, state.eps, state.y, cfg_.c_hit, cfg_.max_box, cfg_.enum_cap);
    } catch (const Error& e) {
      abandon(depth, "fourier", e.what());
      cert_.branches.push_back(tag + "fourier step unavailable" + gate);
      return fallback(state, depth);
    }
    if (dich.branch == Branch::HitDensity) {
      cert_.branches.push_back(tag + "hit density, count " + std::to_string(dich.density_count) + gate);
      return scan(state);
    }
    cert_.branches.push_back(tag + "large coefficients, Q=" + std::to_string(dich.Q) + ", " +
                             std::to_string(dich.witnesses.size()) + " witnesses" + gate);

    if (depth >= cfg_.max_depth) {
      abandon(depth, "reduction", "maximum depth reached");
      return fallback(state, depth);
    }
    if (state.k() < 2) {
      abandon(depth, "reduction", "a single constraint cannot be reduced");
      return fallback(state, depth);
    }

    try {
      RelationParams rp;
      rp.q_rel = cfg_.q_rel > 0 ? cfg_.q_rel : default_q_rel(state.eps, cfg_.c_cfg);
      rp.tol_rel = cfg_.tol_rel;
      rp.c_cfg = cfg_.c_cfg;
      auto rels = build_relations(state.system, state.y, dich, rp);
      if (rels.empty()) {
        abandon(depth, "relations", "no witness produced a relation within tolerance");
        return fallback(state, depth);
      }
      auto cluster = cluster_by_denominator(rels);
      std::vector<mpz_class> attempts{lcm_all(cluster.q0)};
      if (cluster.q_merged != attempts.front()) attempts.push_back(cluster.q_merged);

      for (const auto& q0 : attempts) {
        auto gens = generators(state, q0, depth);
        if (!gens) continue;
        ReductionStep step;
        try {
          Real delta_c = cfg_.delta_const.is_zero() ? default_delta_const(state.k(), state.system.d) : cfg_.delta_const;
          step = reduce_dimension(state, *gens, q0, cfg_.c_cfg, delta_c);
        } catch (const IntegralityFailure& e) {
          abandon(depth, "reduce q0=" + q0.get_str(), e.what());
          continue;
        }
        ++stats_.reductions;
        ChainLink link;
        link.density = density_invariant(state, step, cfg_.c_cfg);
        link.child.system = step.g;
        link.child.eps = step.eps_prime;
        link.child.y = step.y;
        link.step = step;

        std::vector<ChainLink> sub;
        LevelResult child = level(link.child, depth + 1, sub);
        if (!child.n) {
          abandon(depth, "child", child.exhaustive ? "reduced system has no solution below its horizon"
                                                   : "reduced system inconclusive: " + child.reason);
          return fallback(state, depth);
        }
        try {
          LiftResult lr = lift_solution(step, *child.n, state);
          link.n_prime = *child.n;
          link.n = lr.n;
          chain.clear();
          chain.push_back(std::move(link));
          for (auto& s : sub) chain.push_back(std::move(s));
          return {lr.n, false, ""};
        } catch (const Error& e) {
          abandon(depth, "lift", e.what());
          return fallback(state, depth);
        }
      }
      return fallback(state, depth);
    } catch (const Error& e) {
      abandon(depth, "reduction", e.what());
      return fallback(state, depth);
    }
  }

 private:
  void abandon(int depth, const std::string& stage, const std::string& reason) {
    cert_.abandoned.push_back({depth, stage, reason});
  }

  LevelResult scan(const SystemState& state) {
    const std::int64_t last = largest_below(state.y);
    if (last > cfg_.enum_cap) return {std::nullopt, false, "scan range exceeds enum_cap"};
    auto hit = first_hit(state.system, state.eps, state.y, cfg_.enum_cap);
    stats_.evaluations += hit ? *hit : std::max<std::int64_t>(last, 0);
    if (hit) return {hit, false, ""};
    return {std::nullopt, true, "exhaustive scan found no solution"};
  }

  LevelResult fallback(const SystemState& state, int depth) {
    ++stats_.fallbacks;
    cert_.branches.push_back("depth " + std::to_string(depth) + ": fallback scan");
    return scan(state);
  }

  std::optional<GeneratorSet> generators(const SystemState& state, const mpz_class& q0, int depth) {
    const std::size_t k = state.k();
    const long double log_delta = log_real(state.eps.delta_product());
    const long double expo = 2.0L / std::pow(2.0L * static_cast<long double>(k), 4.0L);
    std::vector<mpq_class> B;
    for (std::size_t i = 0; i < k; ++i)
      B.push_back(ceil_dyadic(std::exp(-log_real(state.eps[i]) - expo * log_delta), 20));

    // eta = min(1/100, q0^C / (2x))
    mpq_class eta(1, 100);
    const Real& C = cfg_.c_cfg;
    mpq_class bound;
    if (C.is_exact() && C.mid().get_den() == 1 && C.mid() >= 0) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), q0.get_mpz_t(), C.mid().get_num().get_ui());
      bound = mpq_class(p) / (2 * state.y.upper());
    } else {
      long double l = C.to_long_double() * std::log(q0.get_d()) - std::log(2 * state.y.to_long_double());
      bound = mpq_class(mpz_class(static_cast<unsigned long>(std::ldexp(std::exp(l), 62))), mpz_class(1) << 62);
      bound /= 2;
    }
    bound.canonicalize();
    if (bound < eta) eta = bound;

    PolySystem beta = state.system;
    for (auto& p : beta.polys)
      for (auto& c : p.coeffs) c = c * Real(mpq_class(q0));

    GeneratorParams gp;
    gp.c_orth = cfg_.c_orth;
    gp.max_rank = k - 1;
    try {
      LatticeBasis red = reduce_basis(build_relation_lattice(beta, B, eta));
      std::int64_t pts = count_points_inf(red, mpq_class(1), 2'000'000) - 1;
      gp.n_target = std::max<std::int64_t>(2, pts);
    } catch (const CapExceeded&) {
      gp.n_target = 2;
    }
    auto out = quasi_orthogonal_generators(beta, B, eta, gp);
    if (auto* none = std::get_if<NoShortVector>(&out)) {
      abandon(depth, "generators q0=" + q0.get_str(), none->reason);
      return std::nullopt;
    }
    return std::get<GeneratorSet>(out);
  }

  const SolverConfig& cfg_;
  Certificate& cert_;
  SolveStats& stats_;
};

}  // namespace

SolveOutcome solve(const SystemState& state, const SolverConfig& config) {
  auto start = std::chrono::steady_clock::now();
  SolveOutcome out;
  out.certificate.root = state;
  out.certificate.config = config;
  try {
    state.validate();
    config.validate();
    Solver solver(config, out.certificate, out.stats);
    std::vector<ChainLink> chain;
    LevelResult res = solver.level(state, 0, chain);
    if (res.n) {
      // the root check is exact; anything else is a bug and is reported as such
      if (meets_all(state.system, state.eps, *res.n) && Real(*res.n).certainly_less(state.y)) {
        out.status = Status::Found;
        out.n = res.n;
        out.certificate.chain = std::move(chain);
        out.certificate.found = true;
        out.certificate.n = *res.n;
        out.certificate.dists = eval_system(state.system, *res.n);
      } else {
        out.status = Status::Inconclusive;
        out.certificate.exhausted_reason = "candidate failed root verification";
      }
    } else {
      out.status = res.exhaustive ? Status::NotFound : Status::Inconclusive;
      out.certificate.exhausted_reason = res.reason;
    }
  } catch (const Error& e) {
    out.status = Status::Inconclusive;
    out.certificate.exhausted_reason = e.what();
  }
  out.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------- json

namespace {

Json vec_json(const std::vector<mpz_class>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(int_to_json(x));
  return a;
}

std::vector<mpz_class> vec_from(const Json& j, const std::string& f) {
  if (!j.is_array()) throw ParseError(f + ": expected an array");
  std::vector<mpz_class> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(int_from_json(j[i], f));
  return v;
}

Json rat_json(const mpq_class& q) { return real_to_json(Real(q)); }

mpq_class rat_from(const Json& j, const std::string& f) {
  Real r = real_from_json(j, f);
  if (!r.is_exact()) throw ParseError(f + ": expected an exact rational");
  return r.mid();
}

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field ") + key);
  return j[key];
}

Json density_json(const DensityReport& d) {
  auto num = [](long double v) -> Json {
    if (!std::isfinite(v)) return nullptr;
    return static_cast<double>(v);
  };
  return Json{{"E", num(d.E)},           {"E_prime", num(d.E_prime)},       {"log_lhs", num(d.log_lhs)},
              {"log_rhs", num(d.log_rhs)}, {"log_ratio", num(d.log_ratio)}, {"ratio", num(d.ratio)},
              {"log_c_impl", num(d.log_c_impl)}, {"c_impl", num(d.c_impl)}, {"pass", d.pass}};
}

}  // namespace

Json step_to_json(const ReductionStep& s) {
  Json a = Json::array(), b = Json::array(), blat = Json::array();
  for (const auto& v : s.a_vecs) a.push_back(vec_json(v));
  for (const auto& v : s.b_prime) b.push_back(vec_json(v));
  for (const auto& v : s.B_lat) blat.push_back(rat_json(v));
  Json perm = Json::array();
  for (auto p : s.perm) perm.push_back(p);
  return Json{{"k", s.k},
              {"r", s.r},
              {"k_prime", s.k_prime},
              {"perm", perm},
              {"q0", int_to_json(s.q0)},
              {"D1", int_to_json(s.D1)},
              {"D2", int_to_json(s.D2)},
              {"H", matrix_to_json(s.H)},
              {"a", a},
              {"Z", matrix_to_json(s.Z)},
              {"b_prime", b},
              {"g", system_to_json(s.g)},
              {"eps_prime", eps_to_json(s.eps_prime)},
              {"y", real_to_json(s.y)},
              {"delta_const", real_to_json(s.delta_const)},
              {"C", real_to_json(s.c_cfg)},
              {"B_lat", blat},
              {"eta", rat_json(s.eta)},
              {"min_h_tilde", rat_json(s.min_h_tilde)},
              {"tilde_product", rat_json(s.tilde_product)},
              {"parent_digest", s.parent_digest}};
}

ReductionStep step_from_json(const Json& j) {
  ReductionStep s;
  s.k = at(j, "k").get<std::size_t>();
  s.r = at(j, "r").get<std::size_t>();
  s.k_prime = at(j, "k_prime").get<std::size_t>();
  for (const auto& p : at(j, "perm")) s.perm.push_back(p.get<std::size_t>());
  s.q0 = int_from_json(at(j, "q0"), "q0");
  s.D1 = int_from_json(at(j, "D1"), "D1");
  s.D2 = int_from_json(at(j, "D2"), "D2");
  s.H = int_matrix_from_json(at(j, "H"), "H");
  for (const auto& v : at(j, "a")) s.a_vecs.push_back(vec_from(v, "a"));
  s.Z = int_matrix_from_json(at(j, "Z"), "Z");
  for (const auto& v : at(j, "b_prime")) s.b_prime.push_back(vec_from(v, "b_prime"));
  s.g = system_from_json(at(j, "g"));
  std::vector<Real> ep;
  for (const auto& e : at(j, "eps_prime")) ep.push_back(real_from_json(e, "eps_prime"));
  s.eps_prime = Epsilons(ep);
  s.y = real_from_json(at(j, "y"), "y");
  s.delta_const = real_from_json(at(j, "delta_const"), "delta_const");
  s.c_cfg = real_from_json(at(j, "C"), "C");
  for (const auto& v : at(j, "B_lat")) s.B_lat.push_back(rat_from(v, "B_lat"));
  s.eta = rat_from(at(j, "eta"), "eta");
  s.min_h_tilde = rat_from(at(j, "min_h_tilde"), "min_h_tilde");
  s.tilde_product = rat_from(at(j, "tilde_product"), "tilde_product");
  s.parent_digest = at(j, "parent_digest").get<std::string>();
  return s;
}

Json certificate_to_json(const Certificate& c) {
  Json chain = Json::array();
  for (const auto& l : c.chain) {
    Json child = state_to_json(l.child);
    chain.push_back(Json{{"step", step_to_json(l.step)},
                         {"density", density_json(l.density)},
                         {"child", child},
                         {"child_digest", digest(child)},
                         {"n_prime", l.n_prime},
                         {"n", l.n}});
  }
  Json abandoned = Json::array();
  for (const auto& a : c.abandoned)
    abandoned.push_back(Json{{"depth", a.depth}, {"stage", a.stage}, {"reason", a.reason}});
  Json terminal;
  if (c.found) {
    Json dists = Json::array();
    for (const auto& d : c.dists) dists.push_back(real_to_json(d));
    terminal = Json{{"kind", "FoundN"}, {"n", c.n}, {"dists", dists}};
  } else {
    terminal = Json{{"kind", "Exhausted"}, {"reason", c.exhausted_reason}};
  }
  Json root = state_to_json(c.root);
  return Json{{"root", root},
              {"root_digest", digest(root)},
              {"config", config_to_json(c.config)},
              {"chain", chain},
              {"abandoned", abandoned},
              {"branches", c.branches},
              {"terminal", terminal}};
}

Json outcome_to_json(const SolveOutcome& o) {
  Json j{{"status", status_name(o.status)},
         {"certificate", certificate_to_json(o.certificate)},
         {"stats",
          {{"evaluations", o.stats.evaluations},
           {"reductions", o.stats.reductions},
           {"fallbacks", o.stats.fallbacks},
           {"fourier_calls", o.stats.fourier_calls},
           {"wall_seconds", o.stats.wall_seconds}}}};
  j["n"] = o.n ? Json(*o.n) : Json(nullptr);
  return j;
}

// ---------------------------------------------------------------- verify

VerifyReport verify_certificate(const Json& cert) {
  VerifyReport rep;
  auto check = [&](bool ok, const std::string& what) {
    rep.checks.push_back(what);
    if (!ok) {
      rep.pass = false;
      rep.failures.push_back(what);
    }
  };
  try {
    SystemState root = state_from_json(at(cert, "root"));
    check(at(cert, "root_digest").get<std::string>() == state_digest(root), "root digest");
    SolverConfig cfg = config_from_json(at(cert, "config"));

    const Json& chain = at(cert, "chain");
    SystemState parent = root;
    std::optional<std::int64_t> expect_n;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const std::string tag = "link " + std::to_string(i) + ": ";
      ReductionStep s = step_from_json(at(chain[i], "step"));
      SystemState child = state_from_json(at(chain[i], "child"));
      const std::size_t k = parent.k();
      const int d = parent.system.d;

      check(s.parent_digest == state_digest(parent), tag + "parent digest");
      check(at(chain[i], "child_digest").get<std::string>() == state_digest(child), tag + "child digest");
      check(s.k == k && s.r >= 1 && s.r < k && s.k_prime == k - s.r && child.k() == s.k_prime, tag + "k' < k");
      std::vector<std::size_t> sorted = s.perm;
      std::sort(sorted.begin(), sorted.end());
      bool perm_ok = sorted.size() == k;
      for (std::size_t t = 0; t < sorted.size() && perm_ok; ++t) perm_ok = sorted[t] == t;
      check(perm_ok, tag + "permutation");
      if (!perm_ok || s.k != k || s.r < 1 || s.r >= k) break;

      IntMatrix H1(s.r, s.r);
      for (std::size_t a = 0; a < s.r; ++a)
        for (std::size_t b = 0; b < s.r; ++b) H1(a, b) = s.H(a, b);
      check(abs(determinant(H1)) == s.D1, tag + "D1 = |det H1|");
      check(s.D2 > 0 && mpz_divisible_p(s.D1.get_mpz_t(), s.D2.get_mpz_t()), tag + "D2 divides D1");
      check(abs(determinant(s.Z)) * s.D2 == s.D1, tag + "|det Z| D2 = D1");

      bool bprime = true;
      for (int j = 1; j <= d; ++j) {
        mpz_class scale, qp;
        mpz_pow_ui(scale.get_mpz_t(), s.D2.get_mpz_t(), static_cast<unsigned long>(j));
        mpz_pow_ui(qp.get_mpz_t(), s.q0.get_mpz_t(), static_cast<unsigned long>(j - 1));
        for (std::size_t l = 0; l < s.r; ++l) {
          mpz_class v = 0;
          for (std::size_t t = 0; t < k; ++t) v += s.H(l, t) * s.b_prime[t][static_cast<std::size_t>(j - 1)];
          bprime = bprime && v == scale * qp * s.a_vecs[l][static_cast<std::size_t>(j - 1)];
        }
      }
      check(bprime, tag + "b' reproduces D2^j q0^(j-1) a_j");

      // relations certified on beta = q0 f, in the permuted order
      PolySystem beta;
      beta.d = d;
      for (std::size_t t = 0; t < k; ++t) {
        Poly p = parent.system.polys[s.perm[t]];
        for (auto& c : p.coeffs) c = c * Real(mpq_class(s.q0));
        beta.polys.push_back(p);
      }
      bool member = true;
      mpq_class min_ht = -1, tp = 1;
      for (std::size_t l = 0; l < s.r; ++l) {
        std::vector<long> h(k);
        RatVector ht(k);
        for (std::size_t t = 0; t < k; ++t) {
          h[t] = s.H(l, t).get_si();
          ht[t] = mpq_class(s.H(l, t)) / s.B_lat[t];
        }
        member = member && in_region(beta, s.B_lat, s.eta, h, s.a_vecs[l]);
        mpq_class n = inf_norm(ht);
        tp *= n;
        if (min_ht < 0 || n < min_ht) min_ht = n;
      }
      check(member, tag + "relations lie in the region");
      check(min_ht == s.min_h_tilde && tp == s.tilde_product, tag + "rescaled norms");

      PolySystem g = build_reduced_system(parent.system, s.perm, s.r, s.b_prime, s.Z, s.D2, s.q0);
      check(system_to_json(g) == system_to_json(s.g) && system_to_json(g) == system_to_json(child.system),
            tag + "g = Z^-1 f~");
      Epsilons ep = build_reduced_eps(parent.eps, s.perm, s.r, s.Z, s.delta_const);
      check(eps_to_json(ep) == eps_to_json(s.eps_prime) && eps_to_json(ep) == eps_to_json(child.eps),
            tag + "eps' formula");
      Real y = build_reduced_horizon(parent.y, s.delta_const, s.min_h_tilde, s.q0, s.c_cfg, s.D2);
      check(y == s.y && y == child.y, tag + "horizon formula");
      check(Real(1).certainly_less(y) && y.certainly_less(parent.y), tag + "1 < y < x");

      DensityReport dr = density_invariant(parent, s, s.c_cfg);
      const Json& dj = at(chain[i], "density");
      check(dr.pass && at(dj, "pass").get<bool>(), tag + "density invariant");

      std::int64_t n_prime = at(chain[i], "n_prime").get<std::int64_t>();
      std::int64_t n = at(chain[i], "n").get<std::int64_t>();
      check(mpz_class(n) == mpz_class(n_prime) * s.q0 * s.D2, tag + "n = n' q0 D2");
      check(Real(n).certainly_less(parent.y), tag + "n below parent horizon");
      bool child_ok = false, parent_ok = false;
      try {
        child_ok = meets_all(child.system, child.eps, n_prime);
        parent_ok = meets_all(parent.system, parent.eps, n);
      } catch (const PrecisionError&) {
      }
      check(child_ok, tag + "n' meets the reduced targets");
      check(parent_ok, tag + "n meets the parent targets");
      if (expect_n) check(*expect_n == n, tag + "chain continuity");
      expect_n = n_prime;
      parent = child;
    }

    const Json& term = at(cert, "terminal");
    const std::string kind = at(term, "kind").get<std::string>();
    if (kind == "FoundN") {
      std::int64_t n = at(term, "n").get<std::int64_t>();
      check(n >= 1 && Real(n).certainly_less(root.y), "terminal n below x");
      bool ok = false;
      try {
        ok = meets_all(root.system, root.eps, n);
      } catch (const PrecisionError&) {
      }
      check(ok, "terminal n meets the root targets");
      auto dists = eval_system(root.system, n);
      Json dj = Json::array();
      for (const auto& v : dists) dj.push_back(real_to_json(v));
      check(dj == at(term, "dists"), "terminal dists");
      if (!chain.empty()) check(at(chain[0], "n").get<std::int64_t>() == n, "chain head matches terminal");
    } else {
      check(kind == "Exhausted", "terminal kind");
      check(chain.empty(), "no chain without a solution");
    }
    (void)cfg;
  } catch (const std::exception& e) {
    check(false, std::string("malformed certificate: ") + e.what());
  }
  return rep;
}

// ---------------------------------------------------------------- experiments

PolySystem draw_system(const std::string& generator, int k, int d, std::uint64_t seed, int trial) {
  if (k < 1 || d < 1) throw PreconditionError("k and d must be positive");
  PolySystem s;
  s.d = d;
  for (int i = 0; i < k; ++i) {
    Poly p;
    for (int j = 1; j <= d; ++j) {
      std::uint64_t index = static_cast<std::uint64_t>(i * d + (j - 1));
      std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(index)};
      std::mt19937_64 rng(sq);
      mpq_class v(mpz_class(std::to_string(rng())), mpz_class(1) << 64);
      v.canonicalize();
      if (generator == "uniform") {
        p.coeffs.push_back(Real(v));
      } else if (generator == "monomial") {
        p.coeffs.push_back(j == d ? Real(v) : Real(0));
      } else if (generator == "zero") {
        p.coeffs.push_back(Real(0));
      } else {
        throw PreconditionError("unknown generator " + generator);
      }
    }
    s.polys.push_back(std::move(p));
  }
  return s;
}

long double fit_exponent(const std::vector<std::int64_t>& xs, const std::vector<long double>& mins) {
  if (xs.size() != mins.size() || xs.size() < 2) return std::numeric_limits<long double>::quiet_NaN();
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const long double n = static_cast<long double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(mins[i] > 0)) return std::numeric_limits<long double>::quiet_NaN();
    long double lx = std::log(static_cast<long double>(xs[i])), ly = std::log(mins[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  long double den = n * sxx - sx * sx;
  if (den == 0) return std::numeric_limits<long double>::quiet_NaN();
  return -(n * sxy - sx * sy) / den;
}

long double median(std::vector<long double> v) {
  if (v.empty()) return std::numeric_limits<long double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

ExperimentSummary measure_exponent(const std::string& generator, int k, int d, const std::vector<std::int64_t>& x_grid,
                                   int trials, std::uint64_t seed, std::int64_t enum_cap) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  if (x_grid.empty() || !std::is_sorted(x_grid.begin(), x_grid.end()) || x_grid.front() < 2)
    throw PreconditionError("x grid must be ascending and start at 2 or more");
  ExperimentSummary out;
  std::vector<long double> exps;
  for (int t = 0; t < trials; ++t) {
    PolySystem s = draw_system(generator, k, d, seed, t);
    std::vector<ExperimentRow> rows;
    try {
      auto mins = running_min(s, x_grid, enum_cap);
      long double e = fit_exponent(x_grid, mins);
      for (std::size_t i = 0; i < x_grid.size(); ++i) {
        ExperimentRow r{k, d, x_grid[i], t, seed, mins[i], e, false, ""};
        if (!(mins[i] > 0)) {
          r.skipped = true;
          r.note = "degenerate: minimum is 0";
        }
        rows.push_back(r);
      }
      if (std::isfinite(e)) exps.push_back(e);
    } catch (const CapExceeded& err) {
      for (auto x : x_grid) rows.push_back({k, d, x, t, seed, 0, 0, true, err.what()});
    }
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  out.fitted_trials = static_cast<int>(exps.size());
  out.median_exponent = median(exps);
  return out;
}

}  // namespace fracparts
