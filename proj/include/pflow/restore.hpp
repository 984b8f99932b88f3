#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pflow/ltupf.hpp"
#include "pflow/model.hpp"
#include "pflow/sweep.hpp"

namespace pflow {

struct PhaseSwitch {
  int customer = -1;
  Phase from = Phase::a;
  Phase to = Phase::a;
};

/// Nonlinear-vs-linearized deviation of two solutions on the same network
/// and assignment. Magnitude errors are ||V_nt| - |V_lt||; angle errors are
/// the wrapped angle of V_lt relative to V_nt (radians, signed), which is
/// identical to comparing angles after rotating phases b/c onto phase a.
/// va_range collects the per-phase spread (min, max) of those angle errors.
struct CompareResult {
  std::map<int, Vector3d> vm_error;   // per node, phases a/b/c
  std::map<int, Vector3d> va_error;   // per node, phases a/b/c (radians)
  std::array<std::pair<double, double>, 3> va_range;

  double max_vm_error() const;
  double max_va_error() const;  // largest |angle error|, radians
};

/// Per-node per-phase deviation between a converged nonlinear solution and
/// linearized voltages. Throws std::invalid_argument when the node sets
/// differ.
CompareResult compare_solutions(const SolveResult& ntupf,
                                const std::map<int, Vector3cd>& ltupf_voltage);

/// Result of the feasibility-restoration pipeline.
///  - feasible_initial: the sweep already converges at the initial phases;
///    the switch plan is empty.
///  - restored: the sweep diverged initially, the assignment search found a
///    box-feasible phase plan, and the sweep converges under it; switch_plan
///    lists every customer whose phase changed (never an inflexible one).
///  - infeasible: either no candidate was box-feasible, or the sweep
///    rejected the optimizer's plan (no fallback to the next candidate).
/// `ntupf` holds the last sweep run (converged for the first two outcomes),
/// `ltupf_voltages` the linearized solution at the final assignment when one
/// was computed, and `comparison` the deviation between the two when both
/// exist.
struct RestoreReport {
  enum class Outcome { feasible_initial, restored, infeasible };

  Outcome outcome = Outcome::infeasible;
  std::vector<PhaseSwitch> switch_plan;  // ascending customer id
  std::optional<SolveResult> ntupf;
  std::optional<std::map<int, Vector3cd>> ltupf_voltages;
  std::optional<CompareResult> comparison;
  Assignment final_assignment;
  double ux = 0.0;     // imbalance objective of the final assignment
  long explored = 0;   // linearized solves spent by the search (0 = no search)
};

const char* outcome_name(RestoreReport::Outcome outcome);

/// Feasibility restoration by phase switching:
///   1. run the nonlinear sweep at the initial phases; convergence means the
///      feeder is already operable (feasible_initial);
///   2. otherwise search the flexible customers for the minimum-imbalance
///      box-feasible linearized assignment; exhaustion means infeasible;
///   3. verify the found assignment with the nonlinear sweep; convergence
///      yields restored, rejection is reported infeasible as-is.
/// When the final sweep converged, the linearized system is also solved at
/// the final assignment and the deviation report attached.
RestoreReport restore_feasibility(const Network& net, const SweepOptions& opts,
                                  const LinCoeffs& coeffs,
                                  const VoltageBox& box,
                                  const SearchOptions& search = {});

}  // namespace pflow
