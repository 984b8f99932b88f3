#include "pflow/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pflow/report.hpp"

namespace pflow::cli {

namespace {

struct CommonFlags {
  std::string network_path;
  std::string out_path;
  SweepOptions sweep;
  double v_min = 0.95;
  double v_max = 1.05;
  double ddelta_deg = 10.0;
  int grid = 21;
  int flex_cap = 16;
};

void add_sweep_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tol", f.sweep.tol, "sweep convergence tolerance (pu)");
  cmd->add_option("--max-iter", f.sweep.max_iter, "sweep iteration cap");
  cmd->add_option("--vfloor", f.sweep.v_floor, "divergence floor on |V| (pu)");
}

void add_region_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--vmin", f.v_min, "fit/box magnitude lower bound (pu)");
  cmd->add_option("--vmax", f.v_max, "fit/box magnitude upper bound (pu)");
  cmd->add_option("--ddelta", f.ddelta_deg, "fit/box angle halfwidth (degrees)");
  cmd->add_option("--grid", f.grid, "fit grid count per axis");
}

FitRegion region_from(const CommonFlags& f) {
  FitRegion region;
  region.v_min = f.v_min;
  region.v_max = f.v_max;
  region.delta_halfwidth = deg_to_rad(f.ddelta_deg);
  region.m = region.n = f.grid;
  return region;
}

// Parse + validate a network file; throws std::runtime_error with a
// printable message on any problem.
NetworkDocument load_checked(const std::string& path) {
  NetworkDocument doc = load_network_file(path);
  std::vector<Violation> violations = validate_network(doc.net);
  if (!violations.empty()) {
    std::string msg = "network fails validation:";
    for (const Violation& v : violations) {
      msg += "\n  [";
      msg += violation_kind_name(v.kind);
      msg += "] " + v.detail;
    }
    throw std::runtime_error(msg);
  }
  return doc;
}

int deliver(const std::string& report, const CommonFlags& f, std::ostream& out) {
  if (f.out_path.empty()) {
    out << report;
    return exit_ok;
  }
  std::ofstream file(f.out_path);
  if (!file) throw std::runtime_error("cannot write report to " + f.out_path);
  file << report;
  return exit_ok;
}

int cmd_solve(const CommonFlags& f, std::ostream& out) {
  NetworkDocument doc = load_checked(f.network_path);
  Assignment asg = resolve_assignment(doc.net, {});
  SolveResult res = ntupf_solve(doc.net, asg, f.sweep);
  deliver(render_solve_report(doc, asg, res, f.sweep), f, out);
  return res.converged ? exit_ok : exit_infeasible;
}

int cmd_fit(const CommonFlags& f, std::ostream& out) {
  FitRegion region = region_from(f);
  LinCoeffs lsm = fit_lsm_all(region);  // rank errors surface as input errors
  LinCoeffs cbm = cbm_all(region);
  deliver(render_fit_report(region, lsm, cbm), f, out);
  return exit_ok;
}

int cmd_restore(const CommonFlags& f, std::ostream& out) {
  NetworkDocument doc = load_checked(f.network_path);
  FitRegion region = region_from(f);
  if (!region_well_formed(region))
    throw std::runtime_error("malformed fit region (check --vmin/--vmax/--ddelta/--grid)");
  LinCoeffs coeffs = fit_lsm_all(region);
  VoltageBox box = VoltageBox::from_region(region);
  RestoreReport report = restore_feasibility(doc.net, f.sweep, coeffs, box,
                                             SearchOptions{f.flex_cap});
  deliver(render_restore_report(doc, report, f.sweep), f, out);
  switch (report.outcome) {
    case RestoreReport::Outcome::feasible_initial: return exit_ok;
    case RestoreReport::Outcome::restored: return exit_restored;
    case RestoreReport::Outcome::infeasible: return exit_infeasible;
  }
  return exit_infeasible;
}

int cmd_compare(const CommonFlags& f, std::ostream& out) {
  NetworkDocument doc = load_checked(f.network_path);
  FitRegion region = region_from(f);
  if (!region_well_formed(region))
    throw std::runtime_error("malformed fit region (check --vmin/--vmax/--ddelta/--grid)");
  LinCoeffs coeffs = fit_lsm_all(region);
  VoltageBox box = VoltageBox::from_region(region);
  Assignment asg = resolve_assignment(doc.net, {});
  SolveResult nt = ntupf_solve(doc.net, asg, f.sweep);
  if (!nt.converged) {
    deliver(render_solve_report(doc, asg, nt, f.sweep), f, out);
    return exit_infeasible;
  }
  LtupfSolution lt = solve_ltupf(assemble_ltupf(doc.net, asg, coeffs), box);
  CompareResult cmp = compare_solutions(nt, lt.node_voltage);
  deliver(render_compare_report(doc, asg, nt, lt.node_voltage, cmp), f, out);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"three-phase unbalanced power flow for radial feeders with "
               "phase-switching devices"};
  app.require_subcommand(1);
  CommonFlags f;

  CLI::App* solve = app.add_subcommand("solve", "nonlinear sweep at the initial phases");
  solve->add_option("network", f.network_path, "network file")->required();
  add_sweep_flags(solve, f);
  solve->add_option("--out", f.out_path, "write the report to a file");

  CLI::App* fit = app.add_subcommand("fit", "fit the 1/V* linearizations");
  add_region_flags(fit, f);
  fit->add_option("--out", f.out_path, "write the report to a file");

  CLI::App* restore = app.add_subcommand("restore", "restore feasibility by phase switching");
  restore->add_option("network", f.network_path, "network file")->required();
  add_sweep_flags(restore, f);
  add_region_flags(restore, f);
  restore->add_option("--flex-cap", f.flex_cap, "max switchable customers to enumerate");
  restore->add_option("--out", f.out_path, "write the report to a file");

  CLI::App* compare = app.add_subcommand("compare", "nonlinear vs linearized deviation");
  compare->add_option("network", f.network_path, "network file")->required();
  add_sweep_flags(compare, f);
  add_region_flags(compare, f);
  compare->add_option("--out", f.out_path, "write the report to a file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }

  try {
    if (solve->parsed()) return cmd_solve(f, out);
    if (fit->parsed()) return cmd_fit(f, out);
    if (restore->parsed()) return cmd_restore(f, out);
    return cmd_compare(f, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pflow::cli
