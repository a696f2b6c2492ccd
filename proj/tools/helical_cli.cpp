// Command-line front end: solve the helically reduced wave equation on a
// ball, run the verification suites, or run a manufactured-solution
// convergence study.  See README.md for the config format.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "helical/assemble.hpp"
#include "helical/checks.hpp"
#include "helical/io.hpp"
#include "helical/presets.hpp"
#include "helical/solve.hpp"

namespace fs = std::filesystem;
using namespace helical;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIncompatible = 2;
constexpr int kExitSingular = 3;
constexpr int kExitFailedChecks = 4;

HelicalProblem build_problem(const RunConfig& rc) {
  const HelicalConfig cfg = rc.helical();
  const GridResolution res = rc.resolution();
  HelicalProblem p;
  if (rc.preset == "constant") {
    p = constant_preset(cfg, res, rc.mmax, rc.constant_c, rc.constant_compatible);
  } else if (rc.preset == "manufactured") {
    ManufacturedSolution ms(cfg, rc.manufactured_k);
    p = ms.problem(res, std::max(rc.mmax, rc.manufactured_k));
  } else if (rc.preset == "trig") {
    p = random_problem(cfg, res, rc.mmax, rc.seed);
  } else if (rc.preset == "file") {
    p.config = cfg;
    p.resolution = res;
    p.M = rc.mmax;
    const Grid g = build_grid(cfg, res);
    std::ifstream fs_src(rc.source_file);
    if (!fs_src)
      throw std::invalid_argument("cannot open source_file: " + rc.source_file);
    p.f = read_field_table(fs_src, g);
    std::ifstream fs_bc(rc.boundary_file);
    if (!fs_bc)
      throw std::invalid_argument("cannot open boundary_file: " + rc.boundary_file);
    p.tau = read_boundary_table(fs_bc, g);
  } else {
    throw std::invalid_argument("unknown preset '" + rc.preset + "'");
  }
  p.rtol = rc.rtol;
  p.compat_tol_factor = rc.compat_tol_factor;
  p.allow_incompatible = rc.allow_incompatible;
  return p;
}

void write_solution_files(const fs::path& dir, const FullSolution& sol,
                          const Grid& g, bool dump_operator,
                          const HelicalConfig& cfg) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "solution.dat");
    write_field_table(os, sol.u, g);
  }
  for (const auto& mode : sol.modes) {
    std::ofstream os(dir / ("mode_" + std::to_string(mode.m) + ".dat"));
    write_mode_table(os, mode, g);
  }
  {
    std::ofstream os(dir / "solve_report.txt");
    write_report(os, solve_report_doc(sol.report));
  }
  {
    std::ofstream os(dir / "grid.dat");
    write_grid_table(os, g);
  }
  if (dump_operator) {
    const int M = (static_cast<int>(sol.modes.size()) - 1) / 2;
    for (int m = -M; m <= M; ++m) {
      const DiscreteOperator op = assemble_mode_system(m, g, cfg);
      std::ofstream os(dir / ("operator_m" + std::to_string(m) + ".txt"));
      write_sparse_triplets(os, op.A);
    }
  }
}

int run_solve(const RunConfig& rc, const fs::path& outdir, bool dump_operator) {
  const HelicalConfig cfg = rc.helical();
  const Grid g = build_grid(cfg, rc.resolution());
  try {
    const HelicalProblem p = build_problem(rc);
    const FullSolution sol = solve_full(p);
    write_solution_files(outdir, sol, g, dump_operator, cfg);
    if (!sol.ok) {
      std::cerr << "solve: one or more modes failed; see solve_report.txt\n";
      return kExitSingular;
    }
    std::cout << "solve: wrote " << (outdir / "solution.dat").string() << "\n";
    return kExitOk;
  } catch (const IncompatibleDataError& e) {
    fs::create_directories(outdir);
    std::ofstream os(outdir / "solve_report.txt");
    write_report(os, solve_report_doc(e.report));
    std::cerr << "solve: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const SingularSystemError& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return kExitSingular;
  }
}

int run_verify(const RunConfig& rc, const fs::path& outdir) {
  std::vector<CheckResult> checks;
  const int n = rc.n;
  if (rc.suite == "energy") {
    checks = check_energy_identity(n, rc.seed, 50, rc.energy_max_mode);
    const auto mb = check_multiplier_boundary(n, rc.seed);
    checks.insert(checks.end(), mb.begin(), mb.end());
    // representative EnergyReport and integrand dump for plotting
    const HelicalConfig cfg = rc.helical();
    const Grid g = build_grid(cfg, rc.resolution());
    const auto t = energy_test_triple(g, rc.seed, rc.energy_max_mode);
    fs::create_directories(outdir);
    {
      std::ofstream os(outdir / "energy_report.txt");
      write_report(os, energy_report_doc(energy_report(t.u, t.mult, g, cfg)));
    }
    {
      std::ofstream os(outdir / "energy_field.dat");
      write_field_table(os, t.u, g);
    }
    {
      Eigen::VectorXd integrand;
      noneg_totals(t.u, g, cfg, &integrand);
      std::ofstream os(outdir / "energy_integrand.dat");
      write_field_table(os, integrand, g);
    }
  } else if (rc.suite == "inequality") {
    checks = check_inequality(rc.seed, 1000000);
  } else if (rc.suite == "stokes") {
    checks = check_stokes(n, rc.seed);
  } else if (rc.suite == "uniqueness") {
    checks = check_uniqueness(n, rc.seed);
  } else if (rc.suite == "nullspace") {
    checks = check_nullspace(n, rc.seed);
  } else if (rc.suite == "compat") {
    checks = check_compatibility();
  } else {
    std::cerr << "verify: unknown suite '" << rc.suite
              << "' (one of: energy, inequality, stokes, uniqueness, nullspace, "
                 "compat)\n";
    return kExitUsage;
  }
  bool all = true;
  ReportDoc doc;
  doc.emplace_back("suite", rc.suite);
  doc.emplace_back("seed", std::to_string(rc.seed));
  for (const auto& c : checks) {
    all = all && c.pass;
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    doc.emplace_back(c.name, std::string(c.pass ? "pass" : "fail") + " | " + c.detail);
  }
  fs::create_directories(outdir);
  std::ofstream os(outdir / ("verify_" + rc.suite + ".txt"));
  write_report(os, doc);
  return all ? kExitOk : kExitFailedChecks;
}

int run_convergence(const RunConfig& rc, const fs::path& outdir, int refine) {
  if (rc.preset != "manufactured") {
    std::cerr << "convergence: preset must be 'manufactured' (it carries the "
                 "analytic solution)\n";
    return kExitUsage;
  }
  const HelicalConfig cfg = rc.helical();
  ManufacturedSolution ms(cfg, rc.manufactured_k);
  ReportDoc doc;
  std::cout << "# h L2_error observed_order\n";
  double prev_err = 0.0, order = 0.0;
  GridResolution res = rc.resolution();
  for (int lev = 0; lev < refine; ++lev) {
    const Grid g = build_grid(cfg, res);
    const FullSolution sol =
        solve_full(ms.problem(res, std::max(rc.mmax, rc.manufactured_k)));
    const double err = field_l2_error(sol.u, ms.exact_field(g), g);
    order = lev > 0 ? std::log2(prev_err / err) : 0.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6g %.6g %.4g\n", g.h(), err,
                  lev > 0 ? order : std::nan(""));
    std::cout << buf;
    doc.emplace_back("level_" + std::to_string(lev),
                     std::string(buf, strlen(buf) - 1));
    prev_err = err;
    res.nr *= 2;
    if (cfg.n == 3) res.ntheta *= 2;
  }
  fs::create_directories(outdir);
  std::ofstream os(outdir / "convergence.txt");
  write_report(os, doc);
  const bool pass = order >= 1.8;
  std::cout << (pass ? "PASS" : "FAIL") << " final observed order "
            << order << " (need >= 1.8)\n";
  return pass ? kExitOk : kExitFailedChecks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helical: solver and verification harness for the helically "
               "reduced wave equation on a ball"};
  app.require_subcommand(1);

  std::string config_path, output_dir = ".", suite;
  unsigned seed = 0;
  bool seed_set = false, allow_incompatible = false, dump_operator = false;
  int refine = 0;

  auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write fields");
  solve_cmd->add_option("--config", config_path, "config file")->required();
  solve_cmd->add_option("--output", output_dir, "output directory");
  solve_cmd->add_flag("--allow-incompatible", allow_incompatible,
                      "project tau instead of rejecting incompatible data");
  solve_cmd->add_flag("--dump-operator", dump_operator,
                      "dump per-mode sparse matrices as row/col/re/im triplets");

  auto* verify_cmd = app.add_subcommand("verify", "run one verification suite");
  verify_cmd->add_option("--config", config_path, "config file")->required();
  verify_cmd->add_option("--suite", suite,
                         "energy | inequality | stokes | uniqueness | nullspace | compat");
  verify_cmd->add_option("--output", output_dir, "output directory");
  verify_cmd->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });

  auto* conv_cmd = app.add_subcommand("convergence", "manufactured-solution study");
  conv_cmd->add_option("--config", config_path, "config file")->required();
  conv_cmd->add_option("--refine", refine, "number of refinement levels");
  conv_cmd->add_option("--output", output_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig rc = parse_run_config_file(config_path);
    if (seed_set) rc.seed = seed;
    if (allow_incompatible) rc.allow_incompatible = true;
    if (!suite.empty()) rc.suite = suite;
    if (app.got_subcommand(solve_cmd))
      return run_solve(rc, output_dir, dump_operator);
    if (app.got_subcommand(verify_cmd)) return run_verify(rc, output_dir);
    return run_convergence(rc, output_dir, refine > 0 ? refine : rc.refine);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
