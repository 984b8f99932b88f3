#pragma once

#include <map>
#include <vector>

#include "pflow/model.hpp"

namespace pflow {

/// Stopping rules for the nonlinear sweep. Convergence is declared when the
/// largest per-node voltage change falls below `tol`; divergence when any
/// voltage magnitude collapses below `v_floor` (which would otherwise feed
/// near-zero divisors into the power-balance update) or `max_iter` runs out.
struct SweepOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double v_floor = 0.3;
};

/// Full nonlinear operating point for one assignment.
///  - node_voltage:     per node, phases a/b/c
///  - customer_voltage: service-point voltage V of each customer
///  - customer_current: current I drawn by each customer
///  - segment_current:  per segment index, oriented parent -> child
/// `step_sizes[k]` is the max voltage change of iteration k+1; the last entry
/// of a converged run is below tol.
struct SolveResult {
  std::map<int, Vector3cd> node_voltage;
  std::map<int, Phasor> customer_voltage;
  std::map<int, Phasor> customer_current;
  std::map<int, Vector3cd> segment_current;
  int iterations = 0;
  bool converged = false;
  std::vector<double> step_sizes;
};

/// Constant-power load current: I = (p - jq) / conj(v).
/// Throws std::domain_error when |v| = 0.
Phasor customer_injection(const Phasor& v_customer, double p, double q);

/// Nonlinear three-phase unbalanced power flow by forward-backward sweep.
///
/// Flat start at the root phasors, then per iteration:
///  (i)   customer currents from the power balance, evaluated at the
///        service-point voltage V = U - z_service * I using the node voltage
///        U of the assigned phase and the previous iterate's current;
///  (ii)  leaf-to-root accumulation of segment currents (current balance at
///        every node and phase);
///  (iii) root-to-leaf voltage update across each segment's full 3x3
///        impedance, V_parent - V_child = Z * I_segment.
///
/// Non-convergence (iteration cap or voltage collapse) is a result state,
/// not an error; downstream feasibility logic consumes it. Throws
/// std::invalid_argument on structurally invalid networks or incomplete
/// assignments. Pure function of its inputs: concurrent solves on a shared
/// network are safe.
SolveResult ntupf_solve(const Network& net, const Assignment& asg,
                        const SweepOptions& opts = {});

}  // namespace pflow
