#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capdisp/rng.hpp"
#include "capdisp/sphere.hpp"

namespace capdisp {

// Which way a catalog inequality points. `exact_value` entries are equalities
// (checked within tolerance); `reference` entries carry a constant with no
// observable to compare against.
enum class BoundDirection { upper, lower, exact_value, reference };

std::string to_string(BoundDirection dir);

struct BoundReport {
  std::string name;
  std::map<std::string, double> inputs;
  double bound = 0.0;
  BoundDirection direction = BoundDirection::upper;
  // What the observation means: "n_dispersion", "dispersion",
  // "n_lens_dispersion", "cos_covering_radius", or "" for references.
  std::string observable;
  bool applicable = false;  // inputs inside the stated range
  std::optional<double> observed;
  std::optional<bool> satisfied;  // set iff observed is set
  std::string caveat;  // range note, or "constant parameterized" marker
};

// Records an observation and evaluates satisfaction with 1e-9 slack in the
// direction of the inequality. No-op for references.
void observe(BoundReport& r, double value);

// Every closed-form dispersion bound evaluated at (d, n). Constants the
// source inequalities leave unspecified are read from params and default to
// 1 with a caveat: "lnln_C", "lower_c0", "lower_C", "lens_vc_C", "kcap_k",
// "inradius_C". Out-of-range bounds come back with applicable = false and a
// range note, never silently dropped.
std::vector<BoundReport> bound_catalog(
    int d, std::int64_t n, const std::map<std::string, double>& params = {});

// Runs the certified solver on P and cross-checks the dispersion identity:
// the reported value must equal V(phi) recomputed through the independent
// quadrature path (1e-10), and n*value must be >= 1 - 1e-9. The report's
// observed value is the identity defect; inputs carry both margins.
BoundReport density_identity_check(const PointSet& P);

struct ExperimentConfig {
  std::vector<std::string> kinds;  // simplex | cross | blocks | random | net
  std::vector<int> d;
  std::vector<std::int64_t> n;          // used by blocks and random
  std::vector<std::uint64_t> seeds;     // used by random kinds; default {0}
  std::string method = "exact";         // exact | opt | mc
  int restarts = 32;                    // opt / lens search
  std::int64_t samples = 100000;        // mc
  bool lens = false;                    // also run the lens estimate per row
  double net_eps = 0.5;                 // greedy net resolution for kind "net"
  std::vector<std::string> bounds;      // catalog names; empty = all
  std::map<std::string, double> params;
  std::string out_csv;                  // empty = caller prints
  bool reproducible = false;            // suppress the timestamp comment
};

ExperimentConfig experiment_config_from_json(const std::string& text);

struct ExperimentRow {
  std::string kind;
  int d = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string method;
  double phi = 0.0;
  double value = 0.0;
  bool certified = false;
  std::optional<double> lens_value;
  std::vector<BoundReport> bounds;
  std::string error;  // nonempty = row failed; other fields undefined
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> bound_names;  // column order for CSV
  int failures = 0;
  std::string csv;   // full file contents, schema-tagged
  std::string json;  // same rows as a JSON document
};

// One row per (kind, d, n, seed); deterministic kinds collapse the seed
// grid. Rows are independent tasks with streams derived from (seed, row
// index); failures land in the row's error field and the run continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace capdisp
