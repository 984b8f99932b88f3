#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pflow/linearize.hpp"
#include "pflow/model.hpp"
#include "pflow/sweep.hpp"

namespace pflow {

/// Hard voltage-feasibility box: every node's magnitude must stay in
/// [v_min, v_max] and every angle within delta_halfwidth of its phase
/// center. These are exactly the bounds that scope the linearization, so a
/// box built from the FitRegion that produced the coefficients keeps the
/// surrogate honest.
struct VoltageBox {
  double v_min = 0.95;
  double v_max = 1.05;
  Vector3d delta_center{0.0, 2.0 * pi / 3.0, -2.0 * pi / 3.0};
  double delta_halfwidth = deg_to_rad(10.0);

  static VoltageBox from_region(const FitRegion& region) {
    return {region.v_min, region.v_max, region.delta_center,
            region.delta_halfwidth};
  }

  /// Containment with a 1e-9 numeric guard on both bounds.
  bool contains(Phase phase, const Phasor& v) const;
};

/// Linearized power-flow equations for a fixed assignment, in the real
/// canonical form: every complex quantity contributes a (re, im) column
/// pair, because the linearized power balance couples a current to the
/// conjugate components of a voltage and is therefore not complex-linear.
/// The system is square with exactly one solution on valid networks.
///
/// Column layout (all ids ascending, phases a<b<c, re before im):
///   node voltages | segment currents (by segment index) |
///   per customer: node-side voltage U, service-point voltage V, current I.
/// Row order: root pins, segment voltage drops (traversal order), nodal
/// current balance, then per-customer rows (U link, service drop, power
/// balance).
struct LtupfSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<int> node_ids;      // ascending
  std::vector<int> customer_ids;  // ascending
  int segment_count = 0;

  int dim() const { return static_cast<int>(a.rows()); }
  int col_node(int node_id, Phase phase) const;      // re column; im is +1
  int col_segment(int segment, Phase phase) const;   // re column; im is +1
  int col_customer_u(int customer_id) const;         // re column; im is +1
  int col_customer_v(int customer_id) const;
  int col_customer_i(int customer_id) const;
};

/// Assemble the linearized system for a fixed assignment: with every phase
/// choice frozen, the binary selectors reduce to constants and the whole
/// model is linear by substitution. Throws std::invalid_argument on invalid
/// networks, incomplete assignments, or coefficients fitted on a malformed
/// region.
LtupfSystem assemble_ltupf(const Network& net, const Assignment& asg,
                           const LinCoeffs& coeffs);

/// Solution of one linearized system plus its box verdict. Mirrors the
/// sweep's SolveResult shape (segment currents keyed by segment index) so
/// the two solvers can be checked against the same physical relations.
struct LtupfSolution {
  std::map<int, Vector3cd> node_voltage;
  std::map<int, Phasor> customer_voltage;
  std::map<int, Phasor> customer_current;
  std::map<int, Vector3cd> segment_current;
  bool feasible = false;   // box containment of every node voltage
  double residual = 0.0;   // ||A x - b||_inf of the solved system
};

/// Solve by dense LU with partial pivoting (the system is the real canonical
/// form of the complex network equations) and test the voltage box. Throws
/// std::runtime_error when the matrix is numerically singular.
LtupfSolution solve_ltupf(const LtupfSystem& system, const VoltageBox& box);

/// Phase-imbalance objective U_x: per-phase totals of assigned customer
/// demand, then the largest pairwise gap in either active or reactive power.
/// Customers are accumulated in ascending id order, which makes the value
/// reproducible to the bit across customer orderings.
double imbalance_objective(const Network& net, const Assignment& asg);

struct SearchOptions {
  int flex_cap = 16;  // enumeration guard: at most 3^flex_cap candidates
};

/// Outcome of the exact assignment optimization.
struct SearchOutcome {
  enum class Status { optimal, infeasible };

  Status status = Status::infeasible;
  std::optional<Assignment> best_assignment;
  std::optional<LtupfSolution> best_solution;
  double best_ux = 0.0;              // meaningful when status == optimal
  long explored = 0;                 // linear solves performed
  std::vector<double> ux_stream;     // objective of each explored candidate
  double max_residual = 0.0;         // worst linear residual among explored
};

/// Exact minimum-imbalance phase assignment subject to linearized power flow
/// and the voltage box — the fixed-binary-exactness of the product envelope
/// (rlp_reconstruct) makes objective-ordered enumeration equivalent to the
/// full mixed-integer program. Candidates over `flexible` (every listed
/// customer ranges over a/b/c; unlisted ones keep their initial phase) are
/// evaluated in ascending U_x, ties broken lexicographically by (customer
/// id, phase a<b<c); the first box-feasible candidate is the optimum.
/// Throws std::length_error when |flexible| exceeds opts.flex_cap and
/// std::invalid_argument when `flexible` names a non-flexible customer.
SearchOutcome assignment_search(const Network& net, const LinCoeffs& coeffs,
                                const VoltageBox& box,
                                const std::vector<int>& flexible,
                                const SearchOptions& opts = {});

/// Same, searching over every flexible customer of the network.
SearchOutcome assignment_search(const Network& net, const LinCoeffs& coeffs,
                                const VoltageBox& box,
                                const SearchOptions& opts = {});

}  // namespace pflow
