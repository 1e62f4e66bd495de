// Command-line entry point: verification suites, constant computation,
// residual sweeps, simulation, fitting, adjustment systems, bound checks.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "bbl/adjustments.hpp"
#include "bbl/ansatz.hpp"
#include "bbl/bounds.hpp"
#include "bbl/eigensolver.hpp"
#include "bbl/io.hpp"
#include "bbl/modulation.hpp"
#include "bbl/par.hpp"
#include "bbl/simulator.hpp"
#include "bbl/verify.hpp"

namespace {

constexpr const char* kVersion = "bbl 0.1.0";

struct Common {
  std::string out_dir = ".";
  int threads = 0;
  bool dry_run = false;
};

std::string outpath(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / name).string();
}

bbl::io::RunManifest start_manifest(const std::string& cmd, const bbl::io::Config& cfg,
                                    unsigned long long seed) {
  bbl::io::RunManifest m;
  m.command = cmd;
  m.config_hash = bbl::io::config_hash(cfg);
  m.seed = seed;
  m.started = bbl::io::timestamp_now();
  m.tool_version = kVersion;
  return m;
}

void finish_manifest(bbl::io::RunManifest& m, const Common& c, const std::string& name) {
  m.finished = bbl::io::timestamp_now();
  m.write(outpath(c, name));
}

int cmd_verify(const Common& c, const std::string& suite, double tol_scale) {
  auto rows = bbl::verify::run_suite(suite, tol_scale);
  std::printf("%-36s %14s %12s  %s\n", "check", "max residual", "tolerance", "status");
  for (const auto& r : rows)
    std::printf("%-36s %14.6g %12.4g  %s\n", r.name.c_str(), r.residual, r.tol,
                r.pass ? "PASS" : "FAIL");
  bbl::io::Config cfg;
  cfg.kv["verify.suite"] = suite;
  auto m = start_manifest("verify", cfg, 0);
  finish_manifest(m, c, "manifest_verify_" + suite + ".json");
  return bbl::verify::all_pass(rows) ? 0 : 1;
}

int cmd_lambda0(const Common& c, int n, int grid, double radius, const std::string& out) {
  if (n < 3) {
    std::fprintf(stderr, "lambda0: n >= 3 required\n");
    return 2;
  }
  bbl::eig::EigenGridSpec spec;
  spec.nodes = grid;
  spec.radius = radius;
  bbl::Tolerances tol;
  bbl::io::Config cfg;
  cfg.kv["lambda0.n"] = std::to_string(n);
  cfg.kv["lambda0.grid"] = std::to_string(grid);
  cfg.kv["lambda0.radius"] = bbl::io::format_double(radius);
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("lambda0", cfg, 0);
  try {
    auto res = bbl::eig::solve_lambda0(n, spec, tol);
    bbl::eig::decay_check(res, 0.9);
    std::printf("lambda0 = %.12g\ngap = %.12g\ndecay_rate = %.12g\n", res.lambda0, res.gap,
                res.decay_rate);
    nlohmann::json j;
    j["lambda0"] = res.lambda0;
    j["gap"] = res.gap;
    j["decay_rate"] = res.decay_rate;
    j["grid"] = {{"nodes", grid}, {"radius", radius}};
    const std::string jpath = outpath(c, out + ".json");
    std::ofstream(jpath) << j.dump(2) << "\n";
    bbl::io::Csv csv;
    csv.header = {"r", "xn", "value"};
    for (std::size_t i = 0; i < res.r.size(); ++i)
      for (std::size_t k = 0; k < res.xn.size(); ++k)
        csv.add_row({res.r[i], res.xn[k], res.at(i, k)});
    const std::string cpath = outpath(c, out + ".csv");
    csv.write(cpath);
    m.outputs = {jpath, cpath};
    finish_manifest(m, c, "manifest_lambda0.json");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lambda0: %s\n", e.what());
    return 1;
  }
}

int cmd_modulation(const Common& c, int l, double T, double R, const std::string& out) {
  bbl::io::Config cfg;
  cfg.kv["modulation.l"] = std::to_string(l);
  cfg.kv["modulation.T"] = bbl::io::format_double(T);
  cfg.kv["modulation.R"] = bbl::io::format_double(R);
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("modulation", cfg, 0);
  const double Rcut = R > 0 ? R : std::abs(std::log(T));
  const double A = bbl::modulation::compute_AR(Rcut, 5);
  std::printf("A_R(R=%g) = %.12g\n", Rcut, A);
  bbl::io::Csv csv;
  csv.header = {"t", "T_minus_t", "mu0", "mu1", "xi_offset", "dmu0"};
  // geometric grid in (T-t), 64 per decade across two decades
  std::vector<double> sig, F;
  for (int k = 0; k <= 128; ++k) sig.push_back(T * 0.9 * std::pow(0.01, 1.0 - k / 128.0));
  for (double s : sig) F.push_back(0.0);
  auto mu1 = bbl::modulation::mu1_ode_step(l, F, sig);
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const double t = T - sig[k];
    csv.add_row({t, sig[k], bbl::modulation::mu0(l, T, A, 5, t), mu1[k], 0.0,
                 bbl::modulation::mu0_dot(l, T, A, 5, t)});
  }
  const std::string cpath = outpath(c, out + ".csv");
  csv.write(cpath);
  m.outputs = {cpath};
  finish_manifest(m, c, "manifest_modulation.json");
  return 0;
}

int cmd_ansatz_residual(const Common& c, int l, double T, double decades, const std::string& out) {
  bbl::io::Config cfg;
  cfg.kv["ansatz.l"] = std::to_string(l);
  cfg.kv["ansatz.T"] = bbl::io::format_double(T);
  cfg.kv["ansatz.decades"] = bbl::io::format_double(decades);
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("ansatz_residual", cfg, 0);
  bbl::ansatz::AnsatzConfig acfg;
  acfg.bubbles = {{0.0, l}};
  acfg.T = T;
  acfg.delta = 1.0 / 32.0;
  const double A = bbl::modulation::compute_AR(acfg.cutoff_R(), 5);
  auto path = bbl::ansatz::bare_path(acfg, A);
  bbl::io::Csv csv;
  csv.header = {"t", "r", "xn", "E1", "E2", "G1", "G2"};
  const double siglo = T * std::pow(10.0, -decades);
  for (int kt = 0; kt <= 16; ++kt) {
    const double sigma = T * 0.5 * std::pow(siglo / (T * 0.5), kt / 16.0);
    const double t = T - sigma;
    for (int q = 0; q <= 24; ++q) {
      const double zr = 1e-2 * std::pow(4.0 * acfg.delta / std::sqrt(sigma) / 1e-2, q / 24.0);
      const double x1 = zr * std::sqrt(sigma);
      const double xn = 0.3 * x1;
      auto os = bbl::ansatz::outer_sources(acfg, x1, 0.0, t, path);
      csv.add_row({t, x1, xn, bbl::ansatz::error_E1(acfg, x1, xn, t, path),
                   bbl::ansatz::error_E2_direct(acfg, x1, t, path), os.G1, os.G2});
    }
  }
  auto ratios = bbl::ansatz::residual_shape_check(acfg, 0, T * (1.0 - std::pow(10.0, -decades)),
                                                  T * 0.5, 8, path);
  std::printf("sup |G1|/bound = %.6g\nsup |G2|/bound = %.6g\n", ratios.sup_G1, ratios.sup_G2);
  const std::string cpath = outpath(c, out + ".csv");
  csv.write(cpath);
  m.outputs = {cpath};
  finish_manifest(m, c, "manifest_ansatz_residual.json");
  return 0;
}

int cmd_simulate(const Common& c, const std::string& config_path) {
  bbl::io::Config cfg;
  try {
    cfg = bbl::io::Config::parse_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulate: %s\n", e.what());
    return 2;
  }
  const std::set<std::string> known = {
      "simulate.mode",     "simulate.T",        "simulate.t_end",  "simulate.sup_threshold",
      "simulate.nr",       "simulate.nz",       "simulate.r_max",  "simulate.h_max",
      "simulate.l",        "simulate.t0",       "simulate.output_every", "simulate.amplitude"};
  std::string unknown;
  for (const auto& [k, v] : cfg.kv)
    if (!known.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) {
    std::fprintf(stderr, "simulate: unknown config keys: %s\n", unknown.c_str());
    return 2;
  }
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("simulate", cfg, 0);
  bbl::sim::CylGrid grid;
  grid.nr = static_cast<int>(cfg.get_int("simulate.nr", 4));
  grid.nz = static_cast<int>(cfg.get_int("simulate.nz", 1201));
  grid.r_max = cfg.get_double("simulate.r_max", 1.2);
  grid.h_max = cfg.get_double("simulate.h_max", 1.2);
  const std::string mode = cfg.get("simulate.mode", "type1");
  bbl::sim::SolverState st;
  st.grid = grid;
  st.u.assign(static_cast<std::size_t>(grid.nr) * grid.nz, 0.0);
  const double T = cfg.get_double("simulate.T", 0.04);
  bbl::Tolerances tol;
  if (mode == "type1") {
    bbl::sim::TypeISpec spec;
    spec.T = T;
    spec.C_ap = bbl::sim::type1_constant(spec.alpha, spec.p);
    for (int j = 0; j < grid.nz; ++j) {
      const double v = bbl::sim::type1_exact(spec, j * grid.dz(), 0.0, tol);
      for (int i = 0; i < grid.nr; ++i) st.at(i, j) = v;
    }
  } else if (mode == "ansatz") {
    bbl::ansatz::AnsatzConfig acfg;
    acfg.bubbles = {{0.0, static_cast<int>(cfg.get_int("simulate.l", 0))}};
    acfg.T = T;
    acfg.delta = 1.0 / 32.0;
    const double A = bbl::modulation::compute_AR(acfg.cutoff_R(), 5);
    try {
      st = bbl::sim::seed_with_ansatz(acfg, cfg.get_double("simulate.t0", 0.0), grid, A);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "simulate: infeasible seed: %s\n", e.what());
      return 3;
    }
  } else if (mode != "zero") {
    std::fprintf(stderr, "simulate: unknown mode %s\n", mode.c_str());
    return 2;
  }
  st.dt = bbl::sim::stable_dt(st);
  bbl::sim::RunConfig rc;
  rc.t_end = cfg.get_double("simulate.t_end", T - 6e-4);
  rc.sup_threshold = cfg.get_double("simulate.sup_threshold", 0.0);
  rc.output_every = static_cast<int>(cfg.get_int("simulate.output_every", 400));
  auto series = bbl::sim::run(st, rc);
  bbl::io::Csv csv;
  csv.header = {"t", "dt", "sup_u", "boundary_sup", "mass_proxy"};
  for (const auto& p : series) csv.add_row({p.t, p.dt, p.sup_u, p.boundary_sup, p.mass_proxy});
  const std::string cpath = outpath(c, "series.csv");
  csv.write(cpath);
  nlohmann::json j;
  j["grid"] = {{"nr", grid.nr}, {"nz", grid.nz}, {"r_max", grid.r_max}, {"h_max", grid.h_max}};
  j["cfl_dt"] = st.dt;
  j["config_hash"] = bbl::io::config_hash(cfg);
  j["steps"] = st.step_count;
  j["blown_up"] = st.blown_up;
  const std::string jpath = outpath(c, "simulate.json");
  std::ofstream(jpath) << j.dump(2) << "\n";
  m.outputs = {cpath, jpath};
  finish_manifest(m, c, "manifest_simulate.json");
  std::printf("steps=%lld final sup=%.6g\n", st.step_count, series.back().sup_u);
  return 0;
}

int cmd_fit(const Common& c, const std::string& input, double window_fraction) {
  std::ifstream f(input);
  if (!f) {
    std::fprintf(stderr, "fit: cannot open %s\n", input.c_str());
    return 2;
  }
  std::string line;
  std::getline(f, line);  // header
  std::vector<bbl::sim::SeriesPoint> series;
  while (std::getline(f, line)) {
    bbl::sim::SeriesPoint p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &p.t, &p.dt, &p.sup_u, &p.boundary_sup,
                    &p.mass_proxy) >= 3)
      series.push_back(p);
  }
  try {
    auto fit = bbl::sim::fit_rate(series, window_fraction);
    std::printf("T_est = %.10g\nexponent = %.6g\nprefactor = %.6g\nr2 = %.8g\naccepted = %d\n",
                fit.T_est, fit.exponent, fit.prefactor, fit.r2, fit.accepted ? 1 : 0);
    bbl::io::Config cfg;
    cfg.kv["fit.input"] = input;
    auto m = start_manifest("fit", cfg, 0);
    nlohmann::json j;
    j["T_est"] = fit.T_est;
    j["exponent"] = fit.exponent;
    j["prefactor"] = fit.prefactor;
    j["r2"] = fit.r2;
    j["accepted"] = fit.accepted;
    const std::string jpath = outpath(c, "fit.json");
    std::ofstream(jpath) << j.dump(2) << "\n";
    m.outputs = {jpath};
    finish_manifest(m, c, "manifest_fit.json");
    return fit.accepted ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fit: %s\n", e.what());
    return 1;
  }
}

int cmd_adjust(const Common& c, const std::string& points_file, int order, double d, double time) {
  std::vector<bbl::adjust::BoundaryPoint> pts;
  std::ifstream f(points_file);
  if (!f) {
    std::fprintf(stderr, "adjust: cannot open %s\n", points_file.c_str());
    return 2;
  }
  std::string line;
  while (std::getline(f, line)) {
    bbl::adjust::BoundaryPoint p{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p[0], &p[1], &p[2], &p[3]) == 4)
      pts.push_back(p);
  }
  bbl::io::Config cfg;
  cfg.kv["adjust.points"] = points_file;
  cfg.kv["adjust.order"] = std::to_string(order);
  cfg.kv["adjust.d"] = bbl::io::format_double(d);
  cfg.kv["adjust.time"] = bbl::io::format_double(time);
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("adjust", cfg, 0);
  try {
    auto set = bbl::adjust::build_adjustments(pts, order, d, time);
    std::printf("system size = %zu\nmax Kronecker defect = %.6g\n", set.size(),
                set.max_kronecker_defect);
    nlohmann::json j;
    j["size"] = set.size();
    j["max_kronecker_defect"] = set.max_kronecker_defect;
    const std::string jpath = outpath(c, "adjust.json");
    std::ofstream(jpath) << j.dump(2) << "\n";
    m.outputs = {jpath};
    finish_manifest(m, c, "manifest_adjust.json");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "adjust: %s\n", e.what());
    return 1;
  }
}

int cmd_boundcheck(const Common& c, const std::string& family, const std::string& params,
                   std::size_t samples, unsigned long long seed) {
  bbl::bounds::BoundFamily fam;
  try {
    fam.id = bbl::bounds::family_from_string(family);
    // params: comma-separated key=value pairs
    std::string rest = params;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string item = rest.substr(0, comma);
      rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad param: " + item);
      fam.params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "boundcheck: %s\n", e.what());
    return 2;
  }
  bbl::io::Config cfg;
  cfg.kv["boundcheck.family"] = family;
  cfg.kv["boundcheck.params"] = params;
  cfg.kv["boundcheck.samples"] = std::to_string(samples);
  cfg.kv["boundcheck.seed"] = std::to_string(seed);
  if (c.dry_run) {
    std::printf("%s", cfg.canonical().c_str());
    return 0;
  }
  auto m = start_manifest("boundcheck", cfg, seed);
  try {
    auto rep = bbl::bounds::bound_ratio(fam, 5, samples, seed);
    bbl::io::Csv csv;
    csv.header = {"family", "sample_index", "x_r", "x_n", "t", "lhs", "rhs", "ratio"};
    for (const auto& row : rep.rows) {
      csv.rows.push_back({family, std::to_string(row.index), bbl::io::format_double(row.x_r),
                          bbl::io::format_double(row.x_n), bbl::io::format_double(row.t),
                          bbl::io::format_double(row.lhs), bbl::io::format_double(row.rhs),
                          bbl::io::format_double(row.ratio)});
    }
    const std::string cpath = outpath(c, "boundcheck_" + family + ".csv");
    csv.write(cpath);
    std::printf("sup ratio = %.6g\n", rep.sup_ratio);
    m.outputs = {cpath};
    finish_manifest(m, c, "manifest_boundcheck.json");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "boundcheck: %s\n", e.what());
    return 1;
  }
}

const char* kDefaults = R"([tolerances]
quad_abs = 1e-10
quad_rel = 1e-8
fd_step = 1e-5
eig_tol = 1e-9

[lambda0]
n = 5
grid = 160
radius = 40

[modulation]
l = 0
T = 0.01
R = 0   # 0 means |ln T|

[simulate]
mode = type1   # type1 | ansatz | zero
T = 0.04
t_end = 0.0394
sup_threshold = 0
nr = 4
nz = 1201
r_max = 1.2
h_max = 1.2
output_every = 400

[boundcheck]
samples = 50
seed = 7
)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for half-space heat flow with critical Neumann boundary data"};
  app.set_version_flag("--version", kVersion);
  Common common;
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--threads", common.threads, "worker threads (default: machine, BBL_THREADS wins)");
  app.add_flag("--dry-run", common.dry_run, "print the resolved config without computing");

  std::string suite;
  double tol_scale = 1.0;
  auto* verify = app.add_subcommand("verify", "run a module invariant battery");
  verify->add_option("suite", suite, "profiles|caloric|spectral|kernels|ansatz")->required();
  verify->add_option("--tol-scale", tol_scale, "scale all tolerances");

  int l0_n = 5, l0_grid = 160;
  double l0_radius = 40.0;
  std::string l0_out = "lambda0";
  auto* lam = app.add_subcommand("lambda0", "solve the boundary eigenproblem");
  lam->add_option("--n", l0_n);
  lam->add_option("--grid", l0_grid);
  lam->add_option("--radius", l0_radius);
  lam->add_option("--out", l0_out);

  int mod_l = 0;
  double mod_T = 0.01, mod_R = 0.0;
  std::string mod_out = "modulation";
  auto* mod = app.add_subcommand("modulation", "A_R and the leading scale law");
  mod->add_option("--l", mod_l);
  mod->add_option("--T", mod_T);
  mod->add_option("--R", mod_R);
  mod->add_option("--out", mod_out);

  int ar_l = 0;
  double ar_T = 1e-3, ar_decades = 2.0;
  std::string ar_out = "ansatz_residual";
  auto* ares = app.add_subcommand("ansatz-residual", "single-bubble residual sweep");
  ares->add_option("--l", ar_l);
  ares->add_option("--T", ar_T);
  ares->add_option("--decades", ar_decades);
  ares->add_option("--out", ar_out);

  std::string sim_config;
  auto* simc = app.add_subcommand("simulate", "finite-difference evolution");
  simc->add_option("--config", sim_config, "config file")->required();

  std::string fit_input;
  double fit_window = 0.5;
  auto* fitc = app.add_subcommand("fit", "blow-up rate fit of a series CSV");
  fitc->add_option("--input", fit_input)->required();
  fitc->add_option("--window", fit_window);

  std::string adj_points;
  int adj_order = 2;
  double adj_d = 0.25, adj_time = 0.0;
  auto* adj = app.add_subcommand("adjust", "vanishing adjustment system");
  adj->add_option("--points-file", adj_points)->required();
  adj->add_option("--order", adj_order);
  adj->add_option("--d", adj_d);
  adj->add_option("--time", adj_time, "base time (default d^2/200)");

  std::string bc_family, bc_params;
  std::size_t bc_samples = 50;
  unsigned long long bc_seed = 7;
  auto* bc = app.add_subcommand("boundcheck", "convolution-estimate ratio check");
  bc->add_option("--family", bc_family)->required();
  bc->add_option("--params", bc_params);
  bc->add_option("--samples", bc_samples);
  bc->add_option("--seed", bc_seed);

  bool print_defaults = false;
  auto* cfgc = app.add_subcommand("config", "configuration helpers");
  cfgc->add_flag("--print-defaults", print_defaults);

  CLI11_PARSE(app, argc, argv);
  if (common.threads > 0) bbl::par::set_threads(common.threads);

  try {
    if (*verify) return cmd_verify(common, suite, tol_scale);
    if (*lam) return cmd_lambda0(common, l0_n, l0_grid, l0_radius, l0_out);
    if (*mod) return cmd_modulation(common, mod_l, mod_T, mod_R, mod_out);
    if (*ares) return cmd_ansatz_residual(common, ar_l, ar_T, ar_decades, ar_out);
    if (*simc) return cmd_simulate(common, sim_config);
    if (*fitc) return cmd_fit(common, fit_input, fit_window);
    if (*adj) {
      const double t = adj_time > 0.0 ? adj_time : adj_d * adj_d / 200.0;
      return cmd_adjust(common, adj_points, adj_order, adj_d, t);
    }
    if (*bc) return cmd_boundcheck(common, bc_family, bc_params, bc_samples, bc_seed);
    if (*cfgc) {
      if (print_defaults) std::printf("%s", kDefaults);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "no subcommand given (try --help)\n");
  return 2;
}
