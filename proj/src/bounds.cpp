#include "capdisp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "capdisp/configurations.hpp"
#include "capdisp/parallel.hpp"
#include "capdisp/solver.hpp"
#include "capdisp/volume.hpp"

namespace capdisp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSlack = 1e-9;

double param_or(const std::map<std::string, double>& params,
                const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(BoundDirection dir) {
  switch (dir) {
    case BoundDirection::upper: return "upper";
    case BoundDirection::lower: return "lower";
    case BoundDirection::exact_value: return "exact";
    case BoundDirection::reference: return "reference";
  }
  return "?";
}

void observe(BoundReport& r, double value) {
  if (r.direction == BoundDirection::reference) return;
  r.observed = value;
  switch (r.direction) {
    case BoundDirection::upper:
      r.satisfied = value <= r.bound + kSlack;
      break;
    case BoundDirection::lower:
      r.satisfied = value >= r.bound - kSlack;
      break;
    case BoundDirection::exact_value:
      r.satisfied = std::fabs(value - r.bound) <= kSlack;
      break;
    case BoundDirection::reference:
      break;
  }
}

std::vector<BoundReport> bound_catalog(
    int d, std::int64_t n, const std::map<std::string, double>& params) {
  if (d < 2) throw std::invalid_argument("bound_catalog requires d >= 2");
  if (n < 1) throw std::invalid_argument("bound_catalog requires n >= 1");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const double ln2 = std::log(2.0);
  std::vector<BoundReport> out;

  auto add = [&](std::string name, BoundDirection dir, std::string observable,
                 bool applicable, double bound, std::string caveat,
                 std::map<std::string, double> inputs) -> BoundReport& {
    BoundReport r;
    r.name = std::move(name);
    r.direction = dir;
    r.observable = std::move(observable);
    r.applicable = applicable;
    r.bound = bound;
    r.caveat = std::move(caveat);
    r.inputs = std::move(inputs);
    r.inputs["d"] = dd;
    r.inputs["n"] = nn;
    out.push_back(std::move(r));
    return out.back();
  };

  // Every family member of positive volume missed by n points has volume at
  // least the covering-cap volume, so n * dispersion is at least 1.
  add("trivial_lower", BoundDirection::lower, "n_dispersion", true, 1.0, "",
      {});

  // Up to d+1 points span a proper affine subspace: a half-sphere avoids it.
  add("small_n_exact", BoundDirection::exact_value, "dispersion", n <= d + 1,
      n == 1 ? 1.0 : 0.5,
      n <= d + 1 ? "" : "requires n <= d+1", {});

  // Dispersion never exceeds 1/2 once two points are antipodally spread or
  // better; monotone in n from the exact small-n values.
  add("halving_upper", BoundDirection::upper, "dispersion", n >= 2, 0.5,
      n >= 2 ? "" : "requires n >= 2", {});

  // Semi-random covering with density 400 d ln d.
  add("covering_400", BoundDirection::upper, "n_dispersion", n >= 2,
      400.0 * dd * std::log(dd), n >= 2 ? "" : "requires n >= 2", {});

  // Sharper covering density d ln d + d ln ln d + 5 d.
  add("covering_refined", BoundDirection::upper, "n_dispersion", n >= 2,
      dd * std::log(dd) + dd * std::log(std::log(dd)) + 5.0 * dd,
      n >= 2 ? "" : "requires n >= 2", {});

  // C d ln ln (2n/d) for n >= 2d, constant not pinned down.
  {
    const double C = param_or(params, "lnln_C", 1.0);
    add("lnln_growth", BoundDirection::upper, "n_dispersion", n >= 2 * d,
        C * dd * std::log(std::log(2.0 * nn / dd)),
        std::string(n >= 2 * d ? "" : "requires n >= 2d; ") +
            "absolute constant parameterized (lnln_C = " + fmt_short(C) + ")",
        {{"lnln_C", C}});
  }

  // Asymptotic lower bound c0 d, valid only for n >= C d^((d+3)/2) ln d.
  {
    const double c0 = param_or(params, "lower_c0", 1.0);
    const double C = param_or(params, "lower_C", 1.0);
    const double threshold =
        C * std::pow(dd, 0.5 * (dd + 3.0)) * std::log(dd);
    add("large_n_lower", BoundDirection::lower, "n_dispersion",
        nn >= threshold, c0 * dd,
        std::string(nn >= threshold
                        ? ""
                        : "requires n >= lower_C * d^((d+3)/2) ln d = " +
                              fmt_short(threshold) + "; ") +
            "absolute constants parameterized (lower_c0 = " + fmt_short(c0) +
            ", lower_C = " + fmt_short(C) + ")",
        {{"lower_c0", c0}, {"lower_C", C}, {"n_threshold", threshold}});
  }

  // Shattering-dimension bound for caps: (3(d+2)/ln 2) ln(2en/(d+2)).
  add("caps_vc", BoundDirection::upper, "n_dispersion", n >= d + 2,
      3.0 * (dd + 2.0) / ln2 * std::log(2.0 * std::exp(1.0) * nn / (dd + 2.0)),
      n >= d + 2 ? "holds in expectation for i.i.d. uniform points"
                 : "requires n >= d+2",
      {});

  // Geodesic-net bound for caps: 12 d ln n.
  add("caps_net", BoundDirection::upper, "n_dispersion", n >= 2,
      12.0 * dd * std::log(nn), n >= 2 ? "" : "requires n >= 2", {});

  // Geodesic-net bound for two-cap intersections: 24 (d+1) ln n.
  add("lens_net", BoundDirection::upper, "n_lens_dispersion", n >= 2,
      24.0 * (dd + 1.0) * std::log(nn), n >= 2 ? "" : "requires n >= 2", {});

  // Shattering bound for two-cap intersections: C d ln(en/(32 d)), n >= 32 d.
  {
    const double C = param_or(params, "lens_vc_C", 1.0);
    add("lens_vc", BoundDirection::upper, "n_lens_dispersion", n >= 32 * d,
        C * dd * std::log(std::exp(1.0) * nn / (32.0 * dd)),
        std::string(n >= 32 * d ? "" : "requires n >= 32d; ") +
            "absolute constant parameterized (lens_vc_C = " + fmt_short(C) +
            ")",
        {{"lens_vc_C", C}});
  }

  // Intersections of k caps: (6/ln 2) b ln(en/b) with b = (d+2) k log2(3k),
  // for n >= 2b. Not measured by the harness beyond k = 2.
  {
    const double kd = std::max(2.0, std::floor(param_or(params, "kcap_k", 3.0)));
    const double beta = (dd + 2.0) * kd * std::log(3.0 * kd) / ln2;
    add("kcap_traversal", BoundDirection::upper, "", nn >= 2.0 * beta,
        6.0 / ln2 * beta * std::log(std::exp(1.0) * nn / beta),
        std::string(nn >= 2.0 * beta
                        ? ""
                        : "requires n >= 2 (d+2) k log2(3k) = " +
                              fmt_short(2.0 * beta) + "; ") +
            "k-cap intersections with k = " + fmt_short(kd) +
            "; no observable in this harness",
        {{"k", kd}, {"beta", beta}});
  }

  // Inradius of the hull: cos(phi(n)) <= C sqrt(ln(n/d)/d) for n >= d+2.
  {
    const double C = param_or(params, "inradius_C", 1.0);
    add("inradius_cos", BoundDirection::upper, "cos_covering_radius",
        n >= d + 2, C * std::sqrt(std::log(nn / dd) / dd),
        std::string(n >= d + 2 ? "" : "requires n >= d+2; ") +
            "absolute constant parameterized (inradius_C = " + fmt_short(C) +
            ")",
        {{"inradius_C", C}});
  }

  // Limit of n * dispersion as n grows: the flat covering density. Known
  // exactly only on S^2 (hexagonal covering); otherwise only the asymptotic
  // window is recorded.
  if (d == 2) {
    add("limit_density_reference", BoundDirection::reference, "", true,
        2.0 * kPi / (3.0 * std::sqrt(3.0)),
        "limit of n * dispersion as n -> infinity; attained by the hexagonal "
        "covering",
        {});
  } else {
    const double lo = dd / std::exp(1.5);
    const double hi = dd * std::log(dd) + dd * std::log(std::log(dd)) + 5.0 * dd;
    add("limit_density_reference", BoundDirection::reference, "", true,
        std::numeric_limits<double>::quiet_NaN(),
        "no numeric value for d >= 3; asymptotic lower d/(e sqrt(e)) = " +
            fmt_short(lo) + ", upper estimate " + fmt_short(hi),
        {{"asymptotic_lower", lo}, {"upper_estimate", hi}});
  }

  return out;
}

BoundReport density_identity_check(const PointSet& P) {
  DispersionResult res = covering_radius_exact(P);
  const double v_quad = cap_volume_quadrature(P.d, res.covering_radius);
  const double defect = std::fabs(res.value - v_quad);
  const double n_value = static_cast<double>(P.n()) * res.value;

  BoundReport r;
  r.name = "density_identity";
  r.direction = BoundDirection::upper;
  r.observable = "identity_defect";
  r.applicable = true;
  r.bound = 1e-10;
  r.inputs = {{"d", static_cast<double>(P.d)},
              {"n", static_cast<double>(P.n())},
              {"phi", res.covering_radius},
              {"value", res.value},
              {"quadrature_value", v_quad},
              {"n_value", n_value},
              {"lower_margin", n_value - 1.0}};
  r.observed = defect;
  r.satisfied = defect <= 1e-10 && n_value >= 1.0 - kSlack;
  if (!(n_value >= 1.0 - kSlack)) r.caveat = "n * value fell below 1";
  return r;
}

namespace {

std::vector<std::string> catalog_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const BoundReport& r : bound_catalog(2, 2)) v.push_back(r.name);
    return v;
  }();
  return names;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

struct Task {
  ConfigKind kind;
  int d = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  if (!j.contains("kinds") || !j.contains("d"))
    throw std::invalid_argument("experiment config needs 'kinds' and 'd'");
  cfg.kinds = j.at("kinds").get<std::vector<std::string>>();
  cfg.d = j.at("d").get<std::vector<int>>();
  if (j.contains("n")) cfg.n = j.at("n").get<std::vector<std::int64_t>>();
  if (j.contains("seeds"))
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty()) cfg.seeds = {0};
  cfg.method = j.value("method", std::string("exact"));
  cfg.restarts = j.value("restarts", 32);
  cfg.samples = j.value("samples", std::int64_t{100000});
  cfg.lens = j.value("lens", false);
  cfg.net_eps = j.value("net_eps", 0.5);
  if (j.contains("bounds"))
    cfg.bounds = j.at("bounds").get<std::vector<std::string>>();
  if (j.contains("params"))
    for (auto& [k, v] : j.at("params").items())
      cfg.params[k] = v.get<double>();
  cfg.out_csv = j.value("out", std::string());
  cfg.reproducible = j.value("reproducible", false);

  if (cfg.kinds.empty() || cfg.d.empty())
    throw std::invalid_argument("experiment config: empty kind or d grid");
  std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
  if (uniq.size() != cfg.seeds.size())
    throw std::invalid_argument("experiment config: seeds must be distinct");
  if (cfg.method != "exact" && cfg.method != "opt" && cfg.method != "mc")
    throw std::invalid_argument("experiment config: method must be exact, opt, or mc");
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (const std::string& kind_str : cfg.kinds) {
    const ConfigKind kind = config_kind_from_string(kind_str);
    if (kind == ConfigKind::from_file)
      throw std::invalid_argument("experiment grids cannot use kind 'file'");
    const bool random_kind =
        kind == ConfigKind::random_uniform || kind == ConfigKind::greedy_net;
    const bool needs_n =
        kind == ConfigKind::block_simplices || kind == ConfigKind::random_uniform;
    if (needs_n && cfg.n.empty())
      throw std::invalid_argument("experiment config: kind '" + kind_str +
                                  "' needs an n grid");
    for (int d : cfg.d) {
      std::vector<std::int64_t> ns;
      switch (kind) {
        case ConfigKind::simplex: ns = {d + 2}; break;
        case ConfigKind::cross_polytope: ns = {2 * d + 2}; break;
        case ConfigKind::greedy_net: ns = {0}; break;
        default: ns = cfg.n; break;
      }
      for (std::int64_t n : ns) {
        if (random_kind)
          for (std::uint64_t s : cfg.seeds) tasks.push_back({kind, d, n, s});
        else
          tasks.push_back({kind, d, n, 0});
      }
    }
  }

  // Column selection: the requested names in canonical catalog order.
  std::vector<std::string> selected = catalog_names();
  if (!cfg.bounds.empty()) {
    std::set<std::string> want(cfg.bounds.begin(), cfg.bounds.end());
    for (const std::string& name : cfg.bounds)
      if (std::find(selected.begin(), selected.end(), name) == selected.end())
        throw std::invalid_argument("unknown bound name: " + name);
    std::vector<std::string> keep;
    for (const std::string& name : selected)
      if (want.count(name)) keep.push_back(name);
    selected = keep;
  }

  ExperimentResult result;
  result.bound_names = selected;
  result.rows.resize(tasks.size());

  parallel_for(static_cast<std::int64_t>(tasks.size()), 1, [&](std::int64_t ti) {
    const Task& t = tasks[static_cast<std::size_t>(ti)];
    ExperimentRow& row = result.rows[static_cast<std::size_t>(ti)];
    row.kind = to_string(t.kind);
    row.d = t.d;
    row.n = t.n;
    row.seed = t.seed;
    row.method = cfg.method;
    try {
      Rng rng(t.seed, static_cast<std::uint64_t>(ti));
      PointSet P;
      switch (t.kind) {
        case ConfigKind::simplex: P = regular_simplex(t.d); break;
        case ConfigKind::cross_polytope: P = cross_polytope(t.d); break;
        case ConfigKind::block_simplices:
          P = block_simplices(t.d, static_cast<int>(t.n));
          break;
        case ConfigKind::random_uniform:
          P = random_uniform(t.d, static_cast<int>(t.n), rng);
          break;
        case ConfigKind::greedy_net:
          P = greedy_net(t.d, cfg.net_eps, rng);
          break;
        case ConfigKind::from_file:
          throw std::logic_error("unreachable");
      }
      row.n = P.n();

      DispersionResult res;
      if (cfg.method == "exact")
        res = covering_radius_exact(P);
      else if (cfg.method == "opt")
        res = covering_radius_opt(P, cfg.restarts, rng);
      else
        res = dispersion_monte_carlo(P, cfg.samples, rng);
      row.phi = res.covering_radius;
      row.value = res.value;
      row.certified = res.certified;

      if (cfg.lens) {
        DispersionResult lens = lens_dispersion_estimate(P, cfg.restarts, rng);
        row.lens_value = lens.value;
      }

      if (t.d >= 2) {
        std::vector<BoundReport> catalog =
            bound_catalog(t.d, P.n(), cfg.params);
        const double nv = static_cast<double>(P.n()) * row.value;
        for (BoundReport& r : catalog) {
          if (std::find(selected.begin(), selected.end(), r.name) ==
              selected.end())
            continue;
          if (r.applicable) {
            if (r.observable == "n_dispersion") observe(r, nv);
            else if (r.observable == "dispersion") observe(r, row.value);
            else if (r.observable == "cos_covering_radius")
              observe(r, std::cos(row.phi));
            else if (r.observable == "n_lens_dispersion" && row.lens_value)
              observe(r, static_cast<double>(P.n()) * *row.lens_value);
          }
          row.bounds.push_back(std::move(r));
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  for (const ExperimentRow& row : result.rows)
    if (!row.error.empty()) ++result.failures;

  // CSV, schema-tagged; the timestamp comment is the only nondeterministic
  // line and is dropped under --reproducible.
  std::string csv;
  if (!cfg.reproducible) {
    std::time_t now = std::time(nullptr);
    char stamp[40];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    csv += std::string("# generated ") + stamp + "\n";
  }
  csv += "# schema capdisp.v1\n";
  csv += "kind,d,n,seed,method,phi,value,n_value,certified,lens_value,error";
  for (const std::string& name : selected)
    csv += "," + name + "_bound," + name + "_observed," + name + "_satisfied";
  csv += "\n";
  for (const ExperimentRow& row : result.rows) {
    csv += row.kind + "," + std::to_string(row.d) + "," +
           std::to_string(row.n) + "," + std::to_string(row.seed) + "," +
           row.method + ",";
    if (row.error.empty()) {
      csv += fmt_g(row.phi) + "," + fmt_g(row.value) + "," +
             fmt_g(static_cast<double>(row.n) * row.value) + "," +
             (row.certified ? "1" : "0") + "," +
             (row.lens_value ? fmt_g(*row.lens_value) : "") + ",";
    } else {
      csv += ",,,,," ;
    }
    csv += csv_field(row.error);
    for (const std::string& name : selected) {
      const BoundReport* found = nullptr;
      for (const BoundReport& r : row.bounds)
        if (r.name == name) {
          found = &r;
          break;
        }
      if (!found) {
        csv += ",,,";
        continue;
      }
      csv += "," + fmt_g(found->bound);
      csv += ",";
      if (found->observed) csv += fmt_g(*found->observed);
      csv += ",";
      if (found->satisfied) csv += *found->satisfied ? "1" : "0";
    }
    csv += "\n";
  }
  result.csv = csv;

  nlohmann::json jdoc;
  jdoc["schema"] = "capdisp.v1";
  nlohmann::json jrows = nlohmann::json::array();
  for (const ExperimentRow& row : result.rows) {
    nlohmann::json jr;
    jr["kind"] = row.kind;
    jr["d"] = row.d;
    jr["n"] = row.n;
    jr["seed"] = row.seed;
    jr["method"] = row.method;
    if (row.error.empty()) {
      jr["phi"] = row.phi;
      jr["value"] = row.value;
      jr["n_value"] = static_cast<double>(row.n) * row.value;
      jr["certified"] = row.certified;
      if (row.lens_value) jr["lens_value"] = *row.lens_value;
      nlohmann::json jb = nlohmann::json::array();
      for (const BoundReport& r : row.bounds) {
        nlohmann::json one;
        one["name"] = r.name;
        one["bound"] = r.bound;
        one["direction"] = to_string(r.direction);
        one["observable"] = r.observable;
        one["applicable"] = r.applicable;
        if (r.observed) one["observed"] = *r.observed;
        if (r.satisfied) one["satisfied"] = *r.satisfied;
        if (!r.caveat.empty()) one["caveat"] = r.caveat;
        one["inputs"] = r.inputs;
        jb.push_back(one);
      }
      jr["bounds"] = jb;
    } else {
      jr["error"] = row.error;
    }
    jrows.push_back(jr);
  }
  jdoc["rows"] = jrows;
  result.json = jdoc.dump(2) + "\n";
  return result;
}

}  // namespace capdisp
