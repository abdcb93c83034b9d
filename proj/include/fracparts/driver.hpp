#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracparts/denomstruct.hpp"
#include "fracparts/reduction.hpp"
#include "fracparts/serialize.hpp"

namespace fracparts {

struct SolverConfig {
  Real c_hit{mpq_class(1, 20)};
  Real c_cfg{4};
  Real c_orth{mpq_class(1, 4)};
  Real delta_const{0};  // 0: 1/(16 (k+d)^2) per level
  Real tol_rel{1};
  int precision_bits = kDefaultPrecisionBits;
  std::int64_t enum_cap = kDefaultEnumCap;
  int max_depth = 8;
  std::int64_t brute_force_threshold = 1000;
  std::int64_t max_box = kDefaultMaxBox;
  long q_rel = 0;  // 0: derived from Delta
  std::uint64_t seed = 0;

  void validate() const;
};

Json config_to_json(const SolverConfig& c);
/// Missing keys keep their defaults.
SolverConfig config_from_json(const Json& j);

enum class Status { Found, NotFound, Inconclusive };
std::string status_name(Status s);

struct ChainLink {
  ReductionStep step;
  DensityReport density;
  SystemState child;
  std::int64_t n_prime = 0;  // solution of the child that was lifted
  std::int64_t n = 0;        // its image in the parent
};

struct Abandoned {
  int depth = 0;
  std::string stage;
  std::string reason;
};

struct Certificate {
  SystemState root;
  SolverConfig config;
  std::vector<ChainLink> chain;  // root first
  std::vector<Abandoned> abandoned;
  std::vector<std::string> branches;  // one line per level visited
  bool found = false;
  std::int64_t n = 0;
  std::vector<Real> dists;
  std::string exhausted_reason;
};

struct SolveStats {
  std::int64_t evaluations = 0;
  std::int64_t reductions = 0;
  std::int64_t fallbacks = 0;
  std::int64_t fourier_calls = 0;
  double wall_seconds = 0;
};

struct SolveOutcome {
  Status status = Status::Inconclusive;
  std::optional<std::int64_t> n;
  Certificate certificate;
  SolveStats stats;
};

/// Never throws on search failures; they end up in the certificate.
SolveOutcome solve(const SystemState& state, const SolverConfig& config);

Json step_to_json(const ReductionStep& s);
ReductionStep step_from_json(const Json& j);
Json certificate_to_json(const Certificate& c);
Json outcome_to_json(const SolveOutcome& o);

struct VerifyReport {
  bool pass = true;
  std::vector<std::string> checks;    // what was checked
  std::vector<std::string> failures;  // empty when pass
};

/// Re-checks every recorded invariant of a certificate without searching.
VerifyReport verify_certificate(const Json& cert);

// -- exponent experiments --

struct ExperimentRow {
  int k = 0;
  int d = 0;
  std::int64_t x = 0;
  int trial_id = 0;
  std::uint64_t seed = 0;
  long double min_max_dist = 0;
  long double fitted_exponent = 0;
  bool skipped = false;
  std::string note;
};

struct ExperimentSummary {
  std::vector<ExperimentRow> rows;
  long double median_exponent = 0;  // over trials with a finite fit
  int fitted_trials = 0;
};

/// "uniform": every coefficient uniform in [0,1); "monomial": f_i = a_i X^d;
/// "zero": all coefficients 0. Coefficients are u / 2^64 for u drawn from
/// mt19937_64 seeded with (seed, trial, index).
PolySystem draw_system(const std::string& generator, int k, int d, std::uint64_t seed, int trial);

/// -slope of the least-squares line through (log x, log m).
long double fit_exponent(const std::vector<std::int64_t>& xs, const std::vector<long double>& mins);

ExperimentSummary measure_exponent(const std::string& generator, int k, int d, const std::vector<std::int64_t>& x_grid,
                                   int trials, std::uint64_t seed, std::int64_t enum_cap = kDefaultEnumCap);

long double median(std::vector<long double> v);

}  // namespace fracparts
