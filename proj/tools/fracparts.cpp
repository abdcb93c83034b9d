#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fracparts/driver.hpp"

using namespace fracparts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNegative = 2;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text << "\n";
}

std::vector<std::int64_t> parse_grid(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Real v = Real::parse(item);
    if (!v.is_exact() || v.mid().get_den() != 1) throw ParseError("grid entries must be integers: " + item);
    out.push_back(to_int64(v.mid().get_num()));
  }
  return out;
}

Json freq_json(const FrequencyVector& h) {
  Json a = Json::array();
  for (long v : h) a.push_back(v);
  return a;
}

FrequencyVector freq_from(const Json& j) {
  FrequencyVector h;
  for (const auto& v : j) h.push_back(v.get<long>());
  return h;
}

Json dichotomy_json(const FourierDichotomy& d) {
  Json w = Json::array();
  for (const auto& x : d.witnesses) w.push_back(Json{{"h", freq_json(x.h)}, {"sum_modulus", real_to_json(x.sum_modulus)}});
  return Json{{"branch", d.branch == Branch::HitDensity ? "HitDensity" : "LargeCoefficients"},
              {"density_count", d.density_count},
              {"Q", d.Q},
              {"witnesses", w},
              {"threshold_met", d.threshold_met},
              {"h_cap", d.h_cap},
              {"box_size", d.box_size}};
}

FourierDichotomy dichotomy_from(const Json& j) {
  FourierDichotomy d;
  d.branch = j.at("branch").get<std::string>() == "HitDensity" ? Branch::HitDensity : Branch::LargeCoefficients;
  d.density_count = j.at("density_count").get<std::int64_t>();
  d.Q = j.at("Q").get<std::int64_t>();
  for (const auto& w : j.at("witnesses"))
    d.witnesses.push_back({freq_from(w.at("h")), real_from_json(w.at("sum_modulus"), "sum_modulus")});
  d.threshold_met = j.at("threshold_met").get<bool>();
  d.h_cap = j.at("h_cap").get<std::vector<long>>();
  d.box_size = j.at("box_size").get<std::int64_t>();
  return d;
}

Json relation_json(const RelationTriple& t) {
  Json a = Json::array(), q = Json::array(), r = Json::array();
  for (const auto& v : t.a) a.push_back(int_to_json(v));
  for (const auto& v : t.q) q.push_back(int_to_json(v));
  for (const auto& v : t.residuals) r.push_back(real_to_json(v));
  return Json{{"h", freq_json(t.h)}, {"a", a}, {"q", q}, {"residuals", r}};
}

RelationTriple relation_from(const Json& j) {
  RelationTriple t;
  t.h = freq_from(j.at("h"));
  for (const auto& v : j.at("a")) t.a.push_back(int_from_json(v, "a"));
  for (const auto& v : j.at("q")) t.q.push_back(int_from_json(v, "q"));
  for (const auto& v : j.at("residuals")) t.residuals.push_back(real_from_json(v, "residuals"));
  return t;
}

std::vector<RatVector> rat_rows(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of vectors");
  std::vector<RatVector> out;
  for (const auto& row : j) {
    RatVector v;
    for (const auto& x : row) {
      Real r = real_from_json(x, field);
      if (!r.is_exact()) throw ParseError(field + ": entries must be exact rationals");
      v.push_back(r.mid());
    }
    out.push_back(v);
  }
  return out;
}

Json rat_matrix_json(const RatMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(real_to_json(Real(m(r, c))));
    rows.push_back(row);
  }
  return rows;
}

std::string fmt(long double v) {
  std::ostringstream os;
  os << std::setprecision(17) << static_cast<double>(v);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracparts: small fractional parts of polynomial systems"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // solve
  std::string sys_path, cfg_path, cert_path, out_path;
  auto* solve_cmd = app.add_subcommand("solve", "search for n < x with all fractional parts small");
  solve_cmd->add_option("system", sys_path, "system JSON")->required();
  solve_cmd->add_option("--config", cfg_path, "solver config JSON");
  solve_cmd->add_option("--cert", cert_path, "write the certificate here");
  solve_cmd->add_option("--out", out_path, "write the outcome JSON here (default stdout)");
  solve_cmd->callback([&] {
    SystemState st = state_from_json(read_json(sys_path));
    SolverConfig cfg = cfg_path.empty() ? SolverConfig{} : config_from_json(read_json(cfg_path));
    SolveOutcome o = solve(st, cfg);
    if (!cert_path.empty()) write_text(cert_path, certificate_to_json(o.certificate).dump(1));
    write_text(out_path, outcome_to_json(o).dump(1));
    exit_code = o.status == Status::Found ? kExitOk : kExitNegative;
  });

  // oracle
  std::string oracle_path;
  std::int64_t oracle_cap = kDefaultEnumCap;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force minimum and first hit below x");
  oracle_cmd->add_option("system", oracle_path, "system JSON")->required();
  oracle_cmd->add_option("--enum-cap", oracle_cap, "largest scan range");
  oracle_cmd->callback([&] {
    SystemState st = state_from_json(read_json(oracle_path));
    MinResult m = brute_force_min(st.system, st.y, oracle_cap);
    auto fh = first_hit(st.system, st.eps, st.y, oracle_cap);
    Json j{{"argmin", m.n}, {"min_max_dist", real_to_json(m.value)}, {"min_max_dist_approx", m.value.to_double()}};
    j["first_hit"] = fh ? Json(*fh) : Json(nullptr);
    std::cout << j.dump(1) << "\n";
    exit_code = fh ? kExitOk : kExitNegative;
  });

  // exponent
  int ek = 1, ed = 2, trials = 10;
  std::uint64_t seed = 0;
  std::string grid = "1e3,1e4,1e5", gen = "uniform", csv_path;
  std::int64_t exp_cap = kDefaultEnumCap;
  auto* exp_cmd = app.add_subcommand("exponent", "fit the decay exponent of min_{n<x} max_i |f_i(n)|");
  exp_cmd->add_option("--k", ek, "number of polynomials");
  exp_cmd->add_option("--d", ed, "degree");
  exp_cmd->add_option("--x", grid, "comma separated ascending horizons");
  exp_cmd->add_option("--trials", trials, "trials");
  exp_cmd->add_option("--seed", seed, "seed");
  exp_cmd->add_option("--generator", gen, "uniform | monomial | zero");
  exp_cmd->add_option("--enum-cap", exp_cap, "largest scan range");
  exp_cmd->add_option("--out", csv_path, "CSV output (default stdout)");
  exp_cmd->callback([&] {
    auto sum = measure_exponent(gen, ek, ed, parse_grid(grid), trials, seed, exp_cap);
    std::ostringstream os;
    os << "k,d,x,trial_id,seed,min_max_dist,fitted_exponent\n";
    for (const auto& r : sum.rows)
      os << r.k << "," << r.d << "," << r.x << "," << r.trial_id << "," << r.seed << ","
         << fmt(r.min_max_dist)
         << "," << (std::isfinite(r.fitted_exponent) ? fmt(r.fitted_exponent) : std::string("")) << "\n";
    std::string text = os.str();
    text.pop_back();
    write_text(csv_path, text);
    std::cerr << "median fitted exponent (k=" << ek << ", d=" << ed << "): " << fmt(sum.median_exponent) << " over "
              << sum.fitted_trials << " trials\n";
  });

  // verify-cert
  std::string vc_path;
  auto* vc_cmd = app.add_subcommand("verify-cert", "re-check a certificate without searching");
  vc_cmd->add_option("certificate", vc_path, "certificate JSON")->required();
  vc_cmd->callback([&] {
    auto rep = verify_certificate(read_json(vc_path));
    std::cout << Json{{"pass", rep.pass}, {"checks", rep.checks.size()}, {"failures", rep.failures}}.dump(1) << "\n";
    exit_code = rep.pass ? kExitOk : kExitNegative;
  });

  // fourier-scan
  std::string fs_path, fs_x, fs_chit = "1/20";
  std::int64_t fs_box = kDefaultMaxBox;
  int fs_prec = kDefaultPrecisionBits;
  auto* fs_cmd = app.add_subcommand("fourier-scan", "hit density or large Weyl sums");
  fs_cmd->add_option("system", fs_path, "system JSON")->required();
  fs_cmd->add_option("--x", fs_x, "horizon (default: the file's x)");
  fs_cmd->add_option("--c-hit", fs_chit, "hit density constant");
  fs_cmd->add_option("--max-box", fs_box, "largest frequency box");
  fs_cmd->add_option("--precision", fs_prec, "working precision in bits");
  fs_cmd->callback([&] {
    SystemState st = state_from_json(read_json(fs_path), fs_prec);
    if (!fs_x.empty()) st.y = Real::parse(fs_x, fs_prec);
    auto d = large_coefficients(st.system, st.eps, st.y, Real::parse(fs_chit), fs_box);
    std::cout << Json{{"state", state_to_json(st)}, {"dichotomy", dichotomy_json(d)}}.dump(1) << "\n";
  });

  // relations
  std::string rel_path, rel_tol = "1", rel_c = "4";
  long rel_q = 0;
  auto* rel_cmd = app.add_subcommand("relations", "rational relations from large-sum witnesses");
  rel_cmd->add_option("dichotomy", rel_path, "output of fourier-scan")->required();
  rel_cmd->add_option("--q-rel", rel_q, "denominator bound (default from Delta)");
  rel_cmd->add_option("--tol-rel", rel_tol, "residual tolerance factor");
  rel_cmd->add_option("--c-cfg", rel_c, "exponent C");
  rel_cmd->callback([&] {
    Json in = read_json(rel_path);
    SystemState st = state_from_json(in.at("state"));
    FourierDichotomy d = dichotomy_from(in.at("dichotomy"));
    RelationParams p;
    p.c_cfg = Real::parse(rel_c);
    p.tol_rel = Real::parse(rel_tol);
    p.q_rel = rel_q > 0 ? rel_q : default_q_rel(st.eps, p.c_cfg);
    Json rels = Json::array();
    if (d.branch == Branch::HitDensity) {
      std::cerr << "dichotomy took the hit-density branch; no relations to build\n";
    } else {
      for (const auto& t : build_relations(st.system, st.y, d, p)) rels.push_back(relation_json(t));
    }
    std::cout << Json{{"state", state_to_json(st)}, {"q_rel", p.q_rel}, {"relations", rels}}.dump(1) << "\n";
  });

  // denom-analyze
  std::string da_path;
  auto* da_cmd = app.add_subcommand("denom-analyze", "denominator clustering and divisor structure");
  da_cmd->add_option("relations", da_path, "output of relations")->required();
  da_cmd->callback([&] {
    Json in = read_json(da_path);
    std::vector<RelationTriple> rels;
    for (const auto& r : in.at("relations")) rels.push_back(relation_from(r));
    Json out;
    if (rels.empty()) {
      out = Json{{"members", 0}};
    } else {
      auto cl = cluster_by_denominator(rels);
      std::vector<mpz_class> q1;
      for (const auto& t : cl.members) q1.push_back(t.q.front());
      Json q0 = Json::array();
      for (const auto& v : cl.q0) q0.push_back(int_to_json(v));
      auto edges = gcd_graph(q1, 2);
      auto filt = dominant_divisor_filter(q1, Real(mpq_class(1, 400)));
      out = Json{{"q0", q0},
                 {"q_merged", int_to_json(cl.q_merged)},
                 {"members", cl.members.size()},
                 {"gcd_graph_edges", edges.size()},
                 {"d0", int_to_json(filt.d0)},
                 {"rfold_2", rfold_sum_count(cl.members, 2, 1)},
                 {"rfold_3", rfold_sum_count(cl.members, 3, 1)}};
    }
    std::cout << out.dump(1) << "\n";
  });

  // lattice
  std::string lat_path, lat_B, lat_eta = "1/100";
  std::int64_t lat_target = 2;
  bool m_wedge = false, m_reduce = false, m_gen = false, m_det = false;
  auto* lat_cmd = app.add_subcommand("lattice", "geometry-of-numbers utilities");
  lat_cmd->add_option("input", lat_path, "JSON input")->required();
  auto* g = lat_cmd->add_option_group("mode");
  g->add_flag("--wedge", m_wedge, "input: array of vectors");
  g->add_flag("--reduce", m_reduce, "input: array of basis rows");
  g->add_flag("--generators", m_gen, "input: system JSON; needs --B");
  g->add_flag("--det-identity", m_det, "input: {\"H1\": ..., \"H2\": ...}");
  g->require_option(1);
  lat_cmd->add_option("--B", lat_B, "comma separated box bounds");
  lat_cmd->add_option("--eta", lat_eta, "eta");
  lat_cmd->add_option("--n-target", lat_target, "N in the product bound");
  lat_cmd->callback([&] {
    Json in = read_json(lat_path);
    Json out;
    if (m_wedge) {
      Real w = wedge_norm(rat_rows(in, "vectors"));
      out = Json{{"wedge_norm", real_to_json(w)}, {"approx", w.to_double()}};
    } else if (m_reduce) {
      auto rows = rat_rows(in, "basis");
      LatticeBasis b;
      b.vectors = RatMatrix(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) b.vectors(r, c) = rows[r][c];
      auto red = reduce_basis(b);
      Json minima = Json::array();
      for (const auto& m : red.minima) minima.push_back(real_to_json(Real(m)));
      out = Json{{"basis", rat_matrix_json(red.vectors)}, {"transform", matrix_to_json(red.transform)},
                 {"minima", minima}};
    } else if (m_gen) {
      PolySystem s = system_from_json(in);
      std::vector<mpq_class> B;
      for (auto v : parse_grid(lat_B)) B.emplace_back(v);
      Real eta = Real::parse(lat_eta);
      GeneratorParams p;
      p.n_target = lat_target;
      auto res = quasi_orthogonal_generators(s, B, eta.mid(), p);
      if (auto* none = std::get_if<NoShortVector>(&res)) {
        out = Json{{"result", "NoShortVector"}, {"reason", none->reason}};
        exit_code = kExitNegative;
      } else {
        const auto& gs = std::get<GeneratorSet>(res);
        Json hs = Json::array(), as = Json::array();
        for (const auto& h : gs.h_vecs) hs.push_back(h);
        for (const auto& a : gs.a_vecs) {
          Json row = Json::array();
          for (const auto& v : a) row.push_back(int_to_json(v));
          as.push_back(row);
        }
        out = Json{{"result", "GeneratorSet"},
                   {"r", gs.r},
                   {"h", hs},
                   {"a", as},
                   {"tilde_product", real_to_json(Real(gs.tilde_product))},
                   {"orth_ratio", gs.orth_ratio.to_double()},
                   {"slack_level", gs.slack_level}};
      }
    } else {
      auto rep = sublattice_determinants(int_matrix_from_json(in.at("H1"), "H1"), int_matrix_from_json(in.at("H2"), "H2"));
      out = Json{{"det1", int_to_json(rep.det1)},
                 {"det2", int_to_json(rep.det2)},
                 {"det3", int_to_json(rep.det3)},
                 {"identity_holds", rep.identity_holds}};
    }
    std::cout << out.dump(1) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}
