// Copyright 2026 The idos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line driver: condition checks, region reports, gauge diagnostics,
// DOS curves, expansion fits, and the verification suites.

#include <CLI11.hpp>

#include <iostream>

#include "idos/condition_a.hpp"
#include "idos/diophantine.hpp"
#include "idos/io.hpp"
#include "idos/suites.hpp"

namespace {

using namespace idos;

struct CommonArgs {
  std::string config_path;
  std::string out_flag;
  bool out_set = false;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  unsigned workers_flag = 0;
  bool workers_set = false;
  bool no_cache = false;
};

RunConfig load_run_config(const CommonArgs& args) {
  json j;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw Error("cannot open config " + args.config_path);
    in >> j;
  } else {
    j = json::object();
    j["dim"] = 1;
  }
  return parse_config(std::move(j),
                      args.out_set ? std::optional<std::string>(args.out_flag) : std::nullopt,
                      args.seed_set ? std::optional<std::uint64_t>(args.seed_flag) : std::nullopt,
                      args.workers_set ? std::optional<unsigned>(args.workers_flag) : std::nullopt,
                      args.no_cache);
}

std::string artifact_path(const RunConfig& rc, const std::string& command,
                          const std::string& ext) {
  return rc.out_dir + "/" + command + "-" + config_hash(rc.raw).substr(0, 8) + "." + ext;
}

// Returns true when a cached artifact exists and caching is enabled.
bool use_cached(const RunConfig& rc, const std::string& path) {
  if (!rc.cache) return false;
  if (!std::filesystem::exists(path)) return false;
  std::cerr << "using cached artifact " << path << "\n";
  return true;
}

std::vector<double> lambda_grid(const json& spec) {
  if (spec.is_array()) return spec.get<std::vector<double>>();
  double lo = spec.at("min").get<double>();
  double hi = spec.at("max").get<double>();
  int count = spec.value("count", 20);
  std::string scale = spec.value("scale", "log");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(scale == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return out;
}

int run_check(const RunConfig& rc) {
  const json opts = rc.raw.value("check", json::object());
  std::string path = artifact_path(rc, "check", "json");
  if (use_cached(rc, path)) return 0;

  json out;
  out["provenance"] = provenance(rc);
  rc.potential.validate();
  out["potential_spans"] = rc.potential.freqs().spans();

  int k = opts.value("k", 2);
  int n_max = opts.value("n_max", 50);
  auto repa = check_condition_a(rc.potential.freqs(), k, n_max);
  json ja;
  ja["k"] = k;
  ja["relation_bound"] = n_max;
  ja["tuples_checked"] = repa.tuples_checked;
  ja["dependent_tuples"] = repa.dependent_tuples;
  ja["verdict"] = repa.verdict == ConditionAVerdict::kPass             ? "PASS"
                  : repa.verdict == ConditionAVerdict::kLikelyViolated ? "LIKELY-VIOLATED"
                                                                       : "INCOMPLETE";
  if (!repa.violating_tuple.empty()) {
    json tup = json::array();
    for (const auto& v : repa.violating_tuple)
      tup.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    ja["violating_tuple"] = tup;
  }
  out["condition_a"] = ja;

  // finite trigonometric polynomials are their own cut-off
  out["condition_b"] = "trivially satisfied (finite frequency set)";

  auto q = diophantine_quantities(rc.potential.freqs(), rc.scales);
  json jq;
  jq["r"] = q.r;
  jq["R"] = q.big_r;
  jq["s"] = q.s;
  jq["min_covolume"] = q.min_covolume;
  if (opts.contains("thresholds")) {
    const json& th = opts.at("thresholds");
    jq["r_pass"] = q.r >= th.value("r", 0.0);
    jq["s_pass"] = q.s >= th.value("s", 0.0);
    jq["covolume_pass"] = q.min_covolume >= th.value("covolume", 0.0);
  }
  out["conditions_c_d"] = jq;

  write_text(path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_geometry(const RunConfig& rc) {
  const json opts = rc.raw.value("geometry", json::object());
  std::string path = artifact_path(rc, "geometry", "json");
  if (use_cached(rc, path)) return 0;

  SubspaceTable table(theta_sum(rc.potential.freqs(), rc.scales.k_tilde), rc.scales);
  json out;
  out["provenance"] = provenance(rc);
  out["separation_margin"] = separation_margin(table);
  out["s"] = table.min_pair_sine();
  json subs = json::array();
  for (int m = 0; m <= table.dim(); ++m) {
    json level;
    level["dim"] = m;
    level["count"] = table.by_dim(m).size();
    subs.push_back(level);
  }
  out["subspaces"] = subs;

  DecomposeOptions dopts;
  dopts.max_diameter = opts.value("max_diameter", 0.5);
  json regions = json::array();
  for (int m = 0; m < table.dim(); ++m) {
    for (int idx : table.by_dim(m)) {
      RegionDecomposition rd = decompose_region(table, idx, dopts);
      json jr;
      jr["subspace_dim"] = m;
      jr["directions"] = rd.directions.cols();
      jr["chambers"] = rd.chambers.size();
      jr["general_chambers"] = rd.general_chambers;
      jr["patches"] = rd.patches.size();
      jr["floor"] = rd.floor;
      jr["lemma_pc_certified"] = rd.lemma_pc_certified;
      json certs = json::array();
      for (const auto& patch : rd.patches) {
        json jp;
        jp["chamber"] = patch.chamber;
        jp["min_side"] = patch.n >= 2 ? patch.min_side : -1.0;
        jp["min_angle"] = patch.n >= 3 ? patch.min_angle : -1.0;
        jp["diameter"] = patch.diameter;
        jp["apex"] = std::vector<double>(patch.apex.data(), patch.apex.data() + patch.apex.size());
        certs.push_back(jp);
      }
      jr["patch_certificates"] = certs;
      regions.push_back(jr);
    }
  }
  out["regions"] = regions;
  write_text(path, out.dump(2) + "\n");
  std::cout << "geometry report written to " << path << "\n";
  return 0;
}

int run_gauge(const RunConfig& rc) {
  const json opts = rc.raw.value("gauge", json::object());
  std::string path = artifact_path(rc, "gauge", "json");
  if (use_cached(rc, path)) return 0;

  int ktilde = opts.value("k_tilde", rc.scales.k_tilde);
  Symbol b = Symbol::from_potential(rc.potential);
  GaugeResult gr = gauge_transform(b, rc.scales, ktilde);

  json out;
  out["provenance"] = provenance(rc);
  out["k_tilde"] = ktilde;
  json orders = json::array();
  for (const auto& diag : gr.diagnostics) {
    json jd;
    jd["order"] = diag.order;
    jd["psi_support"] = diag.psi_support;
    jd["b_support"] = diag.b_support;
    jd["t_support"] = diag.t_support;
    jd["psi_norm"] = diag.psi_norm;
    jd["bt_norm"] = diag.bt_norm;
    jd["commutator_residual"] = diag.commutator_residual;
    orders.push_back(jd);
  }
  out["orders"] = orders;
  auto samples = make_norm_grid(rc.potential.dim(), rc.scales.rho_n, 256, rc.seed);
  out["y_symmetry_residual"] = symmetry_residual(gr.y, samples);
  out["w_symmetry_residual"] = symmetry_residual(gr.w, samples);
  out["y_support"] = gr.y.support_size();
  out["w_support"] = gr.w.support_size();
  out["y_norm_estimate"] = norm_estimate(gr.y, 0, 0, samples, rc.scales.beta);
  out["w_norm_estimate"] = norm_estimate(gr.w, 0, 0, samples, rc.scales.beta);
  write_text(path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_dos(const RunConfig& rc, DOSCurve* curve_out = nullptr) {
  const json opts = rc.raw.value("dos", json::object());
  std::string method = opts.value("method", "floquet");
  std::string path = artifact_path(rc, "dos-" + method, "csv");
  if (curve_out == nullptr && use_cached(rc, path)) return 0;

  std::vector<double> lambdas =
      lambda_grid(opts.value("lambdas", json{{"min", 100.0}, {"max", 1000.0}, {"count", 20}}));

  DOSCurve curve;
  if (method == "floquet") {
    BZQuadratureOptions q;
    q.base_cells = opts.value("base_cells", 32);
    q.max_level = opts.value("max_level", 12);
    q.cutoff = opts.value("cutoff", -1.0);
    q.eval_cap = opts.value("eval_cap", 400000ull);
    q.workers = rc.workers;
    curve = floquet_dos_curve(rc.potential, rc.lattice, lambdas, q);
  } else if (method == "gauge-volume") {
    Symbol b = Symbol::from_potential(rc.potential);
    GaugeResult gr = gauge_transform(b, rc.scales, rc.scales.k_tilde);
    SubspaceTable table(theta_sum(rc.potential.freqs(), rc.scales.k_tilde), rc.scales);
    VolumeDosOptions v;
    v.samples = opts.value("samples", 1000000ull);
    v.seed = rc.seed;
    v.workers = rc.workers;
    // validated window for the level-volume identity
    v.window_lo = rc.scales.rho_n * rc.scales.rho_n;
    v.window_hi = 16.0 * rc.scales.rho_n * rc.scales.rho_n;
    curve = volume_dos_curve(gr.w, table, lambdas, v);
  } else {
    throw Error("dos: unknown method " + method);
  }
  std::string csv = dos_curve_csv(curve);
  write_text(path, csv);
  write_text(artifact_path(rc, "dos-" + method + "-meta", "json"),
             provenance(rc).dump(2) + "\n");
  std::cout << csv;
  if (curve_out) *curve_out = curve;
  return 0;
}

int run_fit(const RunConfig& rc) {
  const json opts = rc.raw.value("fit", json::object());
  std::string path = artifact_path(rc, "fit", "json");
  if (use_cached(rc, path)) return 0;

  DOSCurve curve;
  if (opts.contains("curve")) {
    std::ifstream in(opts.at("curve").get<std::string>());
    if (!in) throw Error("fit: cannot open curve file");
    std::stringstream ss;
    ss << in.rdbuf();
    curve = dos_curve_from_csv(ss.str());
  } else {
    run_dos(rc, &curve);
  }
  int j_max = opts.value("j_max", 2);
  bool logs = opts.value("include_logs", false);
  FitResult fr = fit_expansion(curve, rc.dim, j_max, logs);

  json out;
  out["provenance"] = provenance(rc);
  json coefs = json::array();
  for (size_t i = 0; i < fr.terms.size(); ++i) {
    json c;
    c["term"] = fr.terms[i].name();
    c["power"] = fr.terms[i].power;
    c["log_pow"] = fr.terms[i].log_pow;
    c["value"] = fr.coefficients[static_cast<Eigen::Index>(i)];
    c["stderr"] = fr.stderrs[static_cast<Eigen::Index>(i)];
    coefs.push_back(c);
  }
  out["coefficients"] = coefs;
  out["condition_number"] = fr.condition_number;
  out["residual_rel"] = fr.residual_rel;
  out["warnings"] = fr.warnings;
  PaperCoefficients pc = paper_coefficients(rc.potential, rc.dim);
  out["closed_form"] = json{{"C_d", pc.c_d}, {"e1", pc.e1}, {"e2", pc.e2}};
  write_text(path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_verify(const RunConfig& rc) {
  const json opts = rc.raw.value("verify", json::object());
  std::string path = artifact_path(rc, "verify", "json");

  std::vector<suites::ResidueSuiteRow> rows;
  std::vector<SuiteReport> reports;
  reports.push_back(
      suites::residue_suite(opts.value("families", 100), rc.seed + 1, 10.0, 1e-8, &rows));
  reports.push_back(suites::model_integral_suite(opts.value("model_specs", 20), rc.seed + 2));
  reports.push_back(suites::gauge_suite(10.0, 60, rc.seed + 3));

  std::printf("family table (first 10): id size K direct contour rel_err\n");
  for (size_t i = 0; i < rows.size() && i < 10; ++i)
    std::printf("  %3d %d %d %.9e %.9e %.3e\n", rows[i].id, rows[i].size, rows[i].big_k,
                rows[i].direct, rows[i].contour, rows[i].rel_err);

  json out;
  out["provenance"] = provenance(rc);
  bool all = true;
  json jr = json::array();
  for (const auto& rep : reports) {
    for (const auto& c : rep.checks) {
      std::printf("[%s] %s: %s %s\n", c.pass ? "PASS" : "FAIL", rep.suite.c_str(),
                  c.name.c_str(), c.detail.c_str());
      all = all && c.pass;
      jr.push_back(
          json{{"suite", rep.suite}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
  }
  out["checks"] = jr;
  out["pass"] = all;
  write_text(path, out.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density-of-states toolkit for trigonometric-polynomial potentials"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "JSON run configuration");
  auto* out_opt = app.add_option("--out", args.out_flag, "output directory");
  auto* seed_opt = app.add_option("--seed", args.seed_flag, "RNG seed");
  auto* workers_opt = app.add_option("--workers", args.workers_flag, "worker threads");
  app.add_flag("--no-cache", args.no_cache, "ignore cached artifacts");

  auto* c_check = app.add_subcommand("check", "frequency-set condition report");
  auto* c_geom = app.add_subcommand("geometry", "resonance region and patch report");
  auto* c_gauge = app.add_subcommand("gauge", "gauge-transform diagnostics");
  auto* c_dos = app.add_subcommand("dos", "integrated density of states curve");
  auto* c_fit = app.add_subcommand("fit", "asymptotic expansion fit");
  auto* c_verify = app.add_subcommand("verify", "residue/model-integral/gauge suites");

  CLI11_PARSE(app, argc, argv);
  args.out_set = out_opt->count() > 0;
  args.seed_set = seed_opt->count() > 0;
  args.workers_set = workers_opt->count() > 0;

  try {
    idos::RunConfig rc = load_run_config(args);
    if (c_check->parsed()) return run_check(rc);
    if (c_geom->parsed()) return run_geometry(rc);
    if (c_gauge->parsed()) return run_gauge(rc);
    if (c_dos->parsed()) return run_dos(rc);
    if (c_fit->parsed()) return run_fit(rc);
    if (c_verify->parsed()) return run_verify(rc);
  } catch (const std::exception& e) {
    idos::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
