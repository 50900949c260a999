#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capdisp/bounds.hpp"
#include "capdisp/configurations.hpp"
#include "capdisp/solver.hpp"
#include "capdisp/vc.hpp"
#include "capdisp/volume.hpp"

namespace {

using nlohmann::json;
using namespace capdisp;

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json cap_to_json(const Cap& c) {
  return json{{"type", "cap"}, {"center", vec_to_json(c.center)},
              {"radius", c.radius}};
}

json witness_to_json(const DispersionResult& r) {
  if (std::holds_alternative<Cap>(r.witness))
    return cap_to_json(std::get<Cap>(r.witness));
  json caps = json::array();
  for (const Cap& c : std::get<Lens>(r.witness).caps) caps.push_back(cap_to_json(c));
  return json{{"type", "lens"}, {"caps", caps}};
}

json result_to_json(const DispersionResult& r) {
  return json{{"method", to_string(r.method)},
              {"value", r.value},
              {"phi", r.covering_radius},
              {"certified", r.certified},
              {"witness", witness_to_json(r)},
              {"diagnostics", r.diagnostics}};
}

json points_to_json(const PointSet& P) {
  json pts = json::array();
  for (int i = 0; i < P.n(); ++i) pts.push_back(vec_to_json(P.X.col(i)));
  return json{{"d", P.d}, {"n", P.n()}, {"label", P.label}, {"points", pts}};
}

json report_to_json(const BoundReport& r) {
  json one{{"name", r.name},
           {"bound", r.bound},
           {"direction", to_string(r.direction)},
           {"observable", r.observable},
           {"applicable", r.applicable},
           {"inputs", r.inputs}};
  if (r.observed) one["observed"] = *r.observed;
  if (r.satisfied) one["satisfied"] = *r.satisfied;
  if (!r.caveat.empty()) one["caveat"] = r.caveat;
  return one;
}

json family_to_json(const ApproxFamily& f, int sample_members) {
  json out{{"kind", f.kind == FamilyKind::caps ? "caps" : "lenses"},
           {"d", f.d},
           {"gamma", f.gamma},
           {"c0", f.c0},
           {"eps", f.eps},
           {"net_size", f.net_size()},
           {"radius_grid_size", f.radii.size()},
           {"member_count", f.member_count},
           {"log_member_count", f.log_member_count},
           {"cardinality_bound", f.cardinality_bound},
           {"log_cardinality_bound", f.log_cardinality_bound},
           {"within_cardinality_bound",
            f.log_member_count <= f.log_cardinality_bound}};
  if (f.kind == FamilyKind::caps) out["delta"] = f.delta;
  json sample = json::array();
  for (int i = 0; i < sample_members &&
                  static_cast<double>(i) < f.member_count;
       ++i) {
    if (f.kind == FamilyKind::caps)
      sample.push_back(cap_to_json(f.cap_member(i)));
    else {
      json caps = json::array();
      for (const Cap& c : f.lens_member(i).caps) caps.push_back(cap_to_json(c));
      sample.push_back(json{{"type", "lens"}, {"caps", caps}});
    }
  }
  out["sample_members"] = sample;
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const std::string& s : kv) {
    auto pos = s.find('=');
    if (pos == std::string::npos)
      throw CLI::ValidationError("--param expects key=value, got '" + s + "'");
    out[s.substr(0, pos)] = std::stod(s.substr(pos + 1));
  }
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical cap dispersion toolkit"};
  app.require_subcommand(1);

  // volume
  auto* vol = app.add_subcommand("volume", "cap volume V(phi) or its inverse");
  int vol_d = 2;
  double vol_x = 0.0;
  bool vol_inverse = false;
  vol->add_option("--d", vol_d, "sphere dimension")->required();
  vol->add_option("--phi", vol_x,
                  "geodesic radius (target volume with --inverse)")
      ->required();
  vol->add_flag("--inverse", vol_inverse, "solve V(phi) = value for phi");

  // generate
  auto* gen = app.add_subcommand("generate", "write a point configuration");
  std::string gen_kind = "random";
  int gen_d = 2, gen_n = 0;
  double gen_eps = 0.5;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--kind", gen_kind,
                  "simplex | cross | blocks | random | net");
  gen->add_option("--d", gen_d, "sphere dimension")->required();
  gen->add_option("--n", gen_n, "point count (blocks, random)");
  gen->add_option("--eps", gen_eps, "net resolution (net)");
  gen->add_option("--seed", gen_seed, "rng seed (random, net)");
  gen->add_option("--out", gen_out, "output file (.csv or .json)")->required();

  // dispersion
  auto* disp = app.add_subcommand("dispersion", "dispersion of a point set");
  std::string disp_in, disp_method = "exact";
  int disp_restarts = 32;
  std::int64_t disp_samples = 100000;
  std::uint64_t disp_seed = 0;
  bool disp_lens = false;
  disp->add_option("--in", disp_in, "point set file")->required();
  disp->add_option("--method", disp_method, "exact | opt | mc")
      ->check(CLI::IsMember({"exact", "opt", "mc"}));
  disp->add_option("--restarts", disp_restarts, "multistart count (opt)");
  disp->add_option("--samples", disp_samples, "sample count (mc)");
  disp->add_option("--seed", disp_seed, "rng seed");
  disp->add_flag("--lens", disp_lens, "also estimate the lens dispersion");

  // vc
  auto* vc = app.add_subcommand("vc", "shatter counts and VC-type bounds");
  vc->require_subcommand(1);
  auto* vc_shatter = vc->add_subcommand("shatter", "empirical shatter count");
  std::string vcs_in;
  vc_shatter->add_option("--in", vcs_in, "point set file")->required();
  auto* vc_search = vc->add_subcommand("search", "hunt for a shattered k-set");
  int vcsearch_d = 2, vcsearch_k = 4;
  std::int64_t vcsearch_trials = 1000;
  std::uint64_t vcsearch_seed = 0;
  vc_search->add_option("--d", vcsearch_d, "sphere dimension")->required();
  vc_search->add_option("--k", vcsearch_k, "set size")->required();
  vc_search->add_option("--trials", vcsearch_trials, "trial budget");
  vc_search->add_option("--seed", vcsearch_seed, "rng seed");
  auto* vc_bound = vc->add_subcommand("bound", "traversal probability bound");
  std::int64_t vcb_m = 0, vcb_d = 0;
  double vcb_eps = 0.0;
  vc_bound->add_option("--m", vcb_m, "sample size")->required();
  vc_bound->add_option("--d", vcb_d, "VC dimension")->required();
  vc_bound->add_option("--eps", vcb_eps, "volume threshold")->required();

  // nets
  auto* nets = app.add_subcommand("nets", "delta-approximation families");
  nets->require_subcommand(1);
  auto* nets_caps = nets->add_subcommand("caps", "cap family");
  auto* nets_lenses = nets->add_subcommand("lenses", "lens family");
  int nc_d = 2, nl_d = 2;
  double nc_gamma = 0.1, nl_gamma = 0.3;
  nets_caps->add_option("--d", nc_d, "sphere dimension")->required();
  nets_caps->add_option("--gamma", nc_gamma, "target volume")->required();
  nets_lenses->add_option("--d", nl_d, "sphere dimension")->required();
  nets_lenses->add_option("--gamma", nl_gamma, "target volume")->required();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "closed-form bound catalog");
  int b_d = 2;
  std::int64_t b_n = 2;
  std::vector<std::string> b_params;
  bounds->add_option("--d", b_d, "sphere dimension")->required();
  bounds->add_option("--n", b_n, "point count")->required();
  bounds->add_option("--param", b_params, "key=value constant override");

  // experiment
  auto* exp = app.add_subcommand("experiment", "grid run from a JSON config");
  std::string exp_config, exp_out;
  bool exp_json = false, exp_repro = false;
  exp->add_option("--config", exp_config, "JSON config file")->required();
  exp->add_option("--out", exp_out, "CSV output path");
  exp->add_flag("--json", exp_json, "print the JSON document to stdout");
  exp->add_flag("--reproducible", exp_repro, "drop the timestamp comment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (vol->parsed()) {
      if (vol_inverse) {
        double phi = inverse_cap_volume(vol_d, vol_x);
        emit(json{{"d", vol_d}, {"gamma", vol_x}, {"phi", phi}});
      } else {
        emit(json{{"d", vol_d},
                  {"phi", vol_x},
                  {"value", cap_volume(vol_d, vol_x)}});
      }
    } else if (gen->parsed()) {
      ConfigSpec spec;
      spec.kind = config_kind_from_string(gen_kind);
      spec.d = gen_d;
      spec.n = gen_n;
      spec.eps = gen_eps;
      spec.seed = gen_seed;
      PointSet P = make_configuration(spec);
      save_point_set(P, gen_out);
      emit(json{{"kind", to_string(spec.kind)},
                {"d", P.d},
                {"n", P.n()},
                {"out", gen_out}});
    } else if (disp->parsed()) {
      PointSet P = load_point_set(disp_in);
      Rng rng(disp_seed);
      DispersionResult res;
      if (disp_method == "exact")
        res = covering_radius_exact(P);
      else if (disp_method == "opt")
        res = covering_radius_opt(P, disp_restarts, rng);
      else
        res = dispersion_monte_carlo(P, disp_samples, rng);
      json out{{"d", P.d}, {"n", P.n()}, {"dispersion", result_to_json(res)}};
      if (disp_lens) {
        DispersionResult lens = lens_dispersion_estimate(P, disp_restarts, rng);
        out["lens"] = result_to_json(lens);
      }
      emit(out);
    } else if (vc_shatter->parsed()) {
      PointSet P = load_point_set(vcs_in);
      ShatterCount c = empirical_shatter(P);
      emit(json{{"d", P.d},
                {"n", P.n()},
                {"realized", c.realized},
                {"undecided", c.undecided},
                {"sauer_shelah_d_plus_2",
                 phi_sauer_shelah(P.d + 2, P.n()).str()}});
    } else if (vc_search->parsed()) {
      Rng rng(vcsearch_seed);
      auto witness =
          vc_lower_bound_search(vcsearch_d, vcsearch_k, vcsearch_trials, rng);
      json out{{"d", vcsearch_d},
               {"k", vcsearch_k},
               {"trials", vcsearch_trials},
               {"found", witness.has_value()}};
      out["witness"] = witness ? points_to_json(*witness) : json(nullptr);
      emit(out);
    } else if (vc_bound->parsed()) {
      TraversalBound tb = vc_traversal_bound(vcb_m, vcb_d, vcb_eps);
      emit(json{{"m", vcb_m},
                {"d", vcb_d},
                {"eps", vcb_eps},
                {"value", tb.value},
                {"log_value", tb.log_value},
                {"informative", tb.informative}});
    } else if (nets_caps->parsed()) {
      emit(family_to_json(delta_approx_caps(nc_d, nc_gamma), 3));
    } else if (nets_lenses->parsed()) {
      emit(family_to_json(delta_approx_lenses(nl_d, nl_gamma), 3));
    } else if (bounds->parsed()) {
      json arr = json::array();
      for (const BoundReport& r : bound_catalog(b_d, b_n, parse_params(b_params)))
        arr.push_back(report_to_json(r));
      emit(arr);
    } else if (exp->parsed()) {
      ExperimentConfig cfg = experiment_config_from_json(read_file(exp_config));
      if (!exp_out.empty()) cfg.out_csv = exp_out;
      if (exp_repro) cfg.reproducible = true;
      ExperimentResult res = run_experiment(cfg);
      if (!cfg.out_csv.empty()) {
        std::ofstream f(cfg.out_csv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + cfg.out_csv);
        f << res.csv;
      }
      if (exp_json)
        std::cout << res.json;
      else if (cfg.out_csv.empty())
        std::cout << res.csv;
      if (res.failures > 0) {
        std::cerr << res.failures << " row(s) failed\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
