#pragma once

// Suite configuration, seeded random instances, the verification checks and
// the report.

#include "stringtop/io.hpp"
#include "stringtop/tft.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stringtop {

inline constexpr const char *kVersion = "0.1.0";

using Rng = std::mt19937_64;

struct SuiteConfig {
  std::uint64_t seed = 20240917;
  std::vector<int> n_list{1, 2, 3, 4};
  std::map<std::string, int> instances;     // per-check overrides
  std::map<std::string, double> tolerances; // per-check overrides
  TransportPlan plan;
  int grassmann_n = 6;
  int retry_cap = 32;
  int threads = 0; // 0: one per hardware thread

  /// STRINGTOP_SEED if set, else the built-in default.
  static std::uint64_t default_seed();

  void validate() const;
  int instances_for(const std::string &check) const;
  double tolerance_for(const std::string &check) const;
};

struct CheckRecord {
  std::string check;
  std::string paper_ref; // short description of the verified statement
  int instances = 0;
  double max_residual = 0;
  double tolerance = 0;
  bool pass = false;
  double runtime_ms = 0;
  Json details = Json::object();
};

struct Report {
  std::string version = kVersion;
  SuiteConfig config;
  std::vector<CheckRecord> checks;
  bool pass() const;
};

/// Every check the suite knows, in run order.
const std::vector<std::string> &check_names();
std::string check_description(const std::string &check);
int default_instances(const std::string &check);
double default_tolerance(const std::string &check);

/// Runs the selected checks (ConfigError on unknown names). Each check
/// draws from its own generator seeded by (seed, check name), so results do
/// not depend on scheduling.
Report run_suite(const SuiteConfig &config,
                 const std::vector<std::string> &selection);
CheckRecord run_check(const SuiteConfig &config, const std::string &check);

Json to_json(const Report &r);
std::string to_text(const Report &r);
/// Report JSON with runtime fields removed, for determinism comparisons.
Json strip_timing(Json report);

// Random instances -----------------------------------------------------

long uniform_int(Rng &rng, long lo, long hi);
double uniform_real(Rng &rng, double lo, double hi);
/// Rational p/q with q drawn from a fixed list of primes and |p/q| <= bound.
Rational random_rational(Rng &rng, double bound);

/// Rational-vertex loop with the given class on the torus (closure zero on a
/// chart); resamples until every segment has positive length.
PLLoop gen_random_loop(const Space &space, const std::optional<IVec> &cls,
                       int vertex_count, Rng &rng);
PLLoop gen_random_loop(const Space &space, const std::optional<IVec> &cls,
                       int vertex_count, std::uint64_t seed);

/// Deterministic small rational displacement of every vertex (closure kept).
PLLoop perturb_loop(const PLLoop &loop, std::uint64_t seed);

/// Constant A_mu = P D_mu P^-1 with diagonal D_mu of size ~scale.
FlatConnection random_commuting_connection(int n, int d, Rng &rng,
                                           double scale = 0.5);
/// Random field of parity 1 with 0-, 1- and 2-form terms and nilpotent
/// Grassmann labels among the first four generators.
FieldConfig random_field(const Space &space, int n, int generators, Rng &rng);

} // namespace stringtop
