#include "pflow/restore.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pflow {

double CompareResult::max_vm_error() const {
  double worst = 0.0;
  for (const auto& [node, err] : vm_error) worst = std::max(worst, err.maxCoeff());
  return worst;
}

double CompareResult::max_va_error() const {
  double worst = 0.0;
  for (const auto& [node, err] : va_error)
    worst = std::max(worst, err.cwiseAbs().maxCoeff());
  return worst;
}

CompareResult compare_solutions(const SolveResult& ntupf,
                                const std::map<int, Vector3cd>& ltupf_voltage) {
  if (ntupf.node_voltage.size() != ltupf_voltage.size())
    throw std::invalid_argument("solutions cover different node sets");

  CompareResult out;
  for (auto& [lo, hi] : out.va_range) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
  }
  for (const auto& [node, v_nt] : ntupf.node_voltage) {
    auto it = ltupf_voltage.find(node);
    if (it == ltupf_voltage.end())
      throw std::invalid_argument("solutions cover different node sets");
    const Vector3cd& v_lt = it->second;
    Vector3d vm, va;
    for (int ph = 0; ph < 3; ++ph) {
      vm[ph] = std::abs(std::abs(v_nt[ph]) - std::abs(v_lt[ph]));
      // Angle of the ratio wraps away the +/-120 degree phase centers.
      va[ph] = std::arg(v_lt[ph] / v_nt[ph]);
      out.va_range[ph].first = std::min(out.va_range[ph].first, va[ph]);
      out.va_range[ph].second = std::max(out.va_range[ph].second, va[ph]);
    }
    out.vm_error[node] = vm;
    out.va_error[node] = va;
  }
  return out;
}

const char* outcome_name(RestoreReport::Outcome outcome) {
  switch (outcome) {
    case RestoreReport::Outcome::feasible_initial: return "feasible_initial";
    case RestoreReport::Outcome::restored: return "restored";
    case RestoreReport::Outcome::infeasible: return "infeasible";
  }
  return "unknown";
}

RestoreReport restore_feasibility(const Network& net, const SweepOptions& opts,
                                  const LinCoeffs& coeffs,
                                  const VoltageBox& box,
                                  const SearchOptions& search) {
  RestoreReport report;
  Assignment initial = resolve_assignment(net, {});

  // Attach the linearized solution and deviation columns once the final
  // assignment is known and its sweep converged.
  auto attach_linearized = [&](const Assignment& asg) {
    LtupfSolution sol = solve_ltupf(assemble_ltupf(net, asg, coeffs), box);
    report.ltupf_voltages = sol.node_voltage;
    if (report.ntupf && report.ntupf->converged)
      report.comparison = compare_solutions(*report.ntupf, sol.node_voltage);
  };

  SolveResult first = ntupf_solve(net, initial, opts);
  if (first.converged) {
    report.outcome = RestoreReport::Outcome::feasible_initial;
    report.ntupf = std::move(first);
    report.final_assignment = initial;
    report.ux = imbalance_objective(net, initial);
    attach_linearized(initial);
    return report;
  }

  SearchOutcome found = assignment_search(net, coeffs, box, search);
  report.explored = found.explored;
  if (found.status == SearchOutcome::Status::infeasible) {
    report.outcome = RestoreReport::Outcome::infeasible;
    report.ntupf = std::move(first);
    report.final_assignment = initial;
    report.ux = imbalance_objective(net, initial);
    return report;
  }

  const Assignment& chosen = *found.best_assignment;
  SolveResult verified = ntupf_solve(net, chosen, opts);
  report.ntupf = std::move(verified);
  report.final_assignment = chosen;
  report.ux = found.best_ux;
  report.ltupf_voltages = found.best_solution->node_voltage;
  if (!report.ntupf->converged) {
    // The linearized optimum is not physically solvable; report as-is
    // rather than falling back to the next candidate.
    report.outcome = RestoreReport::Outcome::infeasible;
    return report;
  }

  report.outcome = RestoreReport::Outcome::restored;
  for (const auto& [id, phase] : chosen.phase_of) {
    Phase from = initial.at(id);
    if (from != phase) report.switch_plan.push_back({id, from, phase});
  }
  report.comparison =
      compare_solutions(*report.ntupf, *report.ltupf_voltages);
  return report;
}

}  // namespace pflow
