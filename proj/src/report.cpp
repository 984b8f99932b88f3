#include "pflow/report.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>

namespace pflow {

namespace {

void append_f(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  int n = std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out.append(buf, buf + std::min<int>(n, sizeof(buf) - 1));
}

std::string network_name(const NetworkDocument& doc) {
  for (const auto& [key, value] : doc.metadata)
    if (key == "name" && !value.empty()) return value;
  return "unnamed";
}

void append_header(std::string& out, const NetworkDocument& doc,
                   const char* command) {
  out += "pflow-report v1\n";
  out += "command = ";
  out += command;
  out += "\n";
  out += "network = " + network_name(doc) + "\n";
}

void append_sweep_options(std::string& out, const SweepOptions& opts) {
  append_f(out, "tol = %.3e\nmax_iter = %d\nv_floor = %g\n", opts.tol,
           opts.max_iter, opts.v_floor);
}

// V <node> <phase> <vm_pu> <va_deg>
void append_voltage_table(std::string& out,
                          const std::map<int, Vector3cd>& node_voltage) {
  out += "# columns: node phase vm_pu va_deg\n";
  for (const auto& [node, v] : node_voltage)
    for (Phase ph : all_phases)
      append_f(out, "V %d %c %.6f %.4f\n", node, phase_letter(ph),
               std::abs(v[phase_index(ph)]),
               rad_to_deg(std::arg(v[phase_index(ph)])));
}

// Same table extended with deviation columns against linearized voltages.
void append_voltage_error_table(std::string& out,
                                const std::map<int, Vector3cd>& node_voltage,
                                const CompareResult& cmp) {
  out += "# columns: node phase vm_pu va_deg vm_err_pu va_err_deg\n";
  for (const auto& [node, v] : node_voltage)
    for (Phase ph : all_phases) {
      int i = phase_index(ph);
      append_f(out, "V %d %c %.6f %.4f %.3e %.4f\n", node, phase_letter(ph),
               std::abs(v[i]), rad_to_deg(std::arg(v[i])),
               cmp.vm_error.at(node)[i], rad_to_deg(cmp.va_error.at(node)[i]));
    }
}

void append_customer_table(std::string& out, const Network& net,
                           const Assignment& asg) {
  out += "# columns: customer node phase p_pu q_pu kind\n";
  std::map<int, const Customer*> by_id;
  for (const Customer& c : net.customers) by_id[c.id] = &c;
  for (const auto& [id, c] : by_id)
    append_f(out, "C %d %d %c %.6f %.6f %s\n", id, c->node,
             phase_letter(asg.at(id)), c->p, c->q,
             c->flexible ? "psd" : "fixed");
}

void append_va_ranges(std::string& out, const CompareResult& cmp) {
  out += "# columns: phase va_err_min_deg va_err_max_deg\n";
  for (Phase ph : all_phases) {
    const auto& [lo, hi] = cmp.va_range[phase_index(ph)];
    append_f(out, "R %c %.4f %.4f\n", phase_letter(ph), rad_to_deg(lo),
             rad_to_deg(hi));
  }
}

}  // namespace

std::string render_solve_report(const NetworkDocument& doc,
                                const Assignment& asg, const SolveResult& res,
                                const SweepOptions& opts) {
  std::string out;
  append_header(out, doc, "solve");
  append_sweep_options(out, opts);
  append_f(out, "converged = %s\niterations = %d\n",
           res.converged ? "true" : "false", res.iterations);
  if (res.converged) {
    append_voltage_table(out, res.node_voltage);
    append_customer_table(out, doc.net, asg);
  }
  return out;
}

std::string render_fit_report(const FitRegion& region, const LinCoeffs& lsm,
                              const LinCoeffs& cbm) {
  std::string out;
  out += "pflow-report v1\ncommand = fit\n";
  append_f(out, "v_min = %g\nv_max = %g\ndelta_halfwidth_deg = %g\n",
           region.v_min, region.v_max, rad_to_deg(region.delta_halfwidth));
  append_f(out, "grid_m = %d\ngrid_n = %d\n", region.m, region.n);
  out += "# columns: method phase kx ky bx hx hy by max_fit_error\n";
  auto table = [&](const char* method, const LinCoeffs& coeffs) {
    for (Phase ph : all_phases) {
      const PhaseCoeffs& c = coeffs.phase[phase_index(ph)];
      append_f(out, "F %s %c %.12g %.12g %.12g %.12g %.12g %.12g %.6e\n",
               method, phase_letter(ph), c.kx, c.ky, c.bx, c.hx, c.hy, c.by,
               coeffs.max_fit_error[phase_index(ph)]);
    }
  };
  table("lsm", lsm);
  table("cbm", cbm);
  return out;
}

std::string render_restore_report(const NetworkDocument& doc,
                                  const RestoreReport& report,
                                  const SweepOptions& opts) {
  std::string out;
  append_header(out, doc, "restore");
  append_sweep_options(out, opts);
  out += "outcome = ";
  out += outcome_name(report.outcome);
  out += "\n";
  append_f(out, "ux = %.6f\nexplored = %ld\n", report.ux, report.explored);
  if (report.ntupf)
    append_f(out, "ntupf_converged = %s\nntupf_iterations = %d\n",
             report.ntupf->converged ? "true" : "false",
             report.ntupf->iterations);
  append_f(out, "switches = %zu\n", report.switch_plan.size());
  if (!report.switch_plan.empty()) {
    out += "# columns: customer from to\n";
    for (const PhaseSwitch& sw : report.switch_plan)
      append_f(out, "S %d %c %c\n", sw.customer, phase_letter(sw.from),
               phase_letter(sw.to));
  }
  if (report.ntupf && report.ntupf->converged) {
    if (report.comparison)
      append_voltage_error_table(out, report.ntupf->node_voltage,
                                 *report.comparison);
    else
      append_voltage_table(out, report.ntupf->node_voltage);
    append_customer_table(out, doc.net, report.final_assignment);
    if (report.comparison) append_va_ranges(out, *report.comparison);
  }
  return out;
}

std::string render_compare_report(const NetworkDocument& doc,
                                  const Assignment& asg,
                                  const SolveResult& ntupf,
                                  const std::map<int, Vector3cd>& ltupf_voltage,
                                  const CompareResult& cmp) {
  std::string out;
  append_header(out, doc, "compare");
  append_f(out, "converged = %s\niterations = %d\n",
           ntupf.converged ? "true" : "false", ntupf.iterations);
  append_f(out, "max_vm_error_pu = %.3e\nmax_va_error_deg = %.4f\n",
           cmp.max_vm_error(), rad_to_deg(cmp.max_va_error()));
  out += "# columns: node phase vm_nt_pu va_nt_deg vm_lt_pu va_lt_deg vm_err_pu va_err_deg\n";
  for (const auto& [node, v_nt] : ntupf.node_voltage) {
    const Vector3cd& v_lt = ltupf_voltage.at(node);
    for (Phase ph : all_phases) {
      int i = phase_index(ph);
      append_f(out, "X %d %c %.6f %.4f %.6f %.4f %.3e %.4f\n", node,
               phase_letter(ph), std::abs(v_nt[i]), rad_to_deg(std::arg(v_nt[i])),
               std::abs(v_lt[i]), rad_to_deg(std::arg(v_lt[i])),
               cmp.vm_error.at(node)[i], rad_to_deg(cmp.va_error.at(node)[i]));
    }
  }
  append_va_ranges(out, cmp);
  append_customer_table(out, doc.net, asg);
  return out;
}

}  // namespace pflow
