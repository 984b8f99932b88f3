#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pflow/types.hpp"

namespace pflow {

/// One conductor run between two poles. `z` is the Kron-reduced 3x3
/// phase-frame impedance matrix; entry (phi, psi) couples the voltage drop on
/// phase phi to the current on phase psi. Physically meaningful matrices are
/// symmetric with strictly positive resistance on the diagonal.
struct LineSegment {
  int from_node = -1;
  int to_node = -1;
  Matrix3cd z = Matrix3cd::Zero();
};

/// Single-phase PQ customer hanging off a pole through a service drop.
/// `p` is net active demand (negative when rooftop PV exports), `q` reactive.
/// Customers with a phase-switching device are `flexible`; everyone still has
/// a definite `initial_phase`.
struct Customer {
  int id = -1;
  int node = -1;
  double p = 0.0;
  double q = 0.0;
  Phasor z_service{0.0, 0.0};
  bool flexible = false;
  Phase initial_phase = Phase::a;
};

/// Radial feeder: a tree of segments rooted at the distribution transformer,
/// whose low-voltage side holds the fixed `root_voltage` phasors (one per
/// phase). All model types are immutable-by-convention after construction and
/// safe to share across concurrent readers.
struct Network {
  std::set<int> nodes;
  std::vector<LineSegment> segments;
  int root = -1;
  Vector3cd root_voltage = Vector3cd::Zero();
  std::vector<Customer> customers;

  const Customer* find_customer(int id) const;
};

/// Map customer id -> energized phase. Valid assignments are total (exactly
/// one phase per customer) and pin every inflexible customer to its initial
/// phase; resolve_assignment is the constructor that guarantees both.
struct Assignment {
  std::map<int, Phase> phase_of;

  Phase at(int customer_id) const;
  bool contains(int customer_id) const { return phase_of.count(customer_id) != 0; }
};

struct Violation {
  enum class Kind {
    missing_root,
    segment_endpoint_unknown,
    cycle,
    disconnected,
    customer_node_unknown,
    customer_at_root,
    duplicate_customer_id,
    asymmetric_impedance,
    impedance_not_passive,
    service_drop_negative,
    root_voltage_zero,
    nonfinite_value,
  };
  Kind kind;
  std::string detail;
};

const char* violation_kind_name(Violation::Kind kind);

/// Checks every structural invariant of `net` and returns the complete list
/// of violations; an empty list certifies the network valid. Violations are
/// data, not exceptions.
std::vector<Violation> validate_network(const Network& net);

/// One root-outward traversal step: segment `segment` (index into
/// net.segments) carries power from `parent` into `child`. The stored
/// segment endpoints may be written in either orientation; the step fixes it.
struct TraversalStep {
  int segment = -1;
  int parent = -1;
  int child = -1;
};

/// Root-outward segment order (parents always precede their children);
/// reversing it gives the leaf-to-root order used by sweep accumulation.
/// Children of a node are visited in ascending node id, which makes the
/// order deterministic. Throws std::invalid_argument on invalid networks.
std::vector<TraversalStep> topological_order(const Network& net);

/// Cached structural views of a validated radial network, shared by the
/// solvers. `customers_at` buckets customer indices per node, ascending by
/// customer id, so that every accumulation loop is order-deterministic.
struct Radial {
  std::vector<TraversalStep> order;
  std::map<int, int> parent_segment;            // child node -> segment index
  std::map<int, std::vector<int>> child_segments;  // node -> segment indices
  std::map<int, std::vector<int>> customers_at;    // node -> customer indices
  std::vector<int> customer_order;              // customer indices, ascending id
};

Radial analyze(const Network& net);

/// Build a total Assignment: inflexible customers keep initial_phase,
/// flexible ones take `flexible_choice` (defaulting to initial_phase when
/// absent). Throws std::invalid_argument if a key names an inflexible or
/// unknown customer.
Assignment resolve_assignment(const Network& net,
                              const std::map<int, Phase>& flexible_choice);

/// Ascending ids of the customers carrying a phase-switching device.
std::vector<int> flexible_ids(const Network& net);

}  // namespace pflow
