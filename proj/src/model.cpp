#include "pflow/model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace pflow {

const Customer* Network::find_customer(int id) const {
  for (const Customer& c : customers)
    if (c.id == id) return &c;
  return nullptr;
}

Phase Assignment::at(int customer_id) const {
  auto it = phase_of.find(customer_id);
  if (it == phase_of.end())
    throw std::out_of_range("assignment has no entry for customer " +
                            std::to_string(customer_id));
  return it->second;
}

const char* violation_kind_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::missing_root: return "missing_root";
    case Violation::Kind::segment_endpoint_unknown: return "segment_endpoint_unknown";
    case Violation::Kind::cycle: return "cycle";
    case Violation::Kind::disconnected: return "disconnected";
    case Violation::Kind::customer_node_unknown: return "customer_node_unknown";
    case Violation::Kind::customer_at_root: return "customer_at_root";
    case Violation::Kind::duplicate_customer_id: return "duplicate_customer_id";
    case Violation::Kind::asymmetric_impedance: return "asymmetric_impedance";
    case Violation::Kind::impedance_not_passive: return "impedance_not_passive";
    case Violation::Kind::service_drop_negative: return "service_drop_negative";
    case Violation::Kind::root_voltage_zero: return "root_voltage_zero";
    case Violation::Kind::nonfinite_value: return "nonfinite_value";
  }
  return "unknown";
}

namespace {

std::string segment_label(const Network& net, size_t idx) {
  std::ostringstream os;
  os << "segment " << idx << " (" << net.segments[idx].from_node << "-"
     << net.segments[idx].to_node << ")";
  return os.str();
}

}  // namespace

std::vector<Violation> validate_network(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](Violation::Kind kind, std::string detail) {
    out.push_back({kind, std::move(detail)});
  };

  if (!net.nodes.count(net.root))
    add(Violation::Kind::missing_root,
        "root node " + std::to_string(net.root) + " is not in the node set");

  for (int ph = 0; ph < 3; ++ph) {
    if (!finite(net.root_voltage[ph]))
      add(Violation::Kind::nonfinite_value,
          std::string("root voltage phase ") + phase_letter(all_phases[ph]));
    else if (std::abs(net.root_voltage[ph]) == 0.0)
      add(Violation::Kind::root_voltage_zero,
          std::string("root voltage is zero on phase ") +
              phase_letter(all_phases[ph]));
  }

  for (size_t k = 0; k < net.segments.size(); ++k) {
    const LineSegment& s = net.segments[k];
    if (!net.nodes.count(s.from_node) || !net.nodes.count(s.to_node))
      add(Violation::Kind::segment_endpoint_unknown, segment_label(net, k));
    if (!finite(s.z)) {
      add(Violation::Kind::nonfinite_value, segment_label(net, k));
      continue;
    }
    if (max_abs(s.z - s.z.transpose()) > 0.0)
      add(Violation::Kind::asymmetric_impedance, segment_label(net, k));
    for (int d = 0; d < 3; ++d)
      if (s.z(d, d).real() <= 0.0) {
        add(Violation::Kind::impedance_not_passive,
            segment_label(net, k) + " diagonal " + phase_letter(all_phases[d]));
        break;
      }
  }

  // Tree shape: |segments| = |nodes| - 1, all endpoints known, everything
  // reachable from the root, no repeated edge use. BFS over the undirected
  // segment graph detects both cycles and disconnection.
  {
    std::map<int, std::vector<std::pair<int, int>>> adj;  // node -> (peer, seg)
    bool endpoints_ok = true;
    for (size_t k = 0; k < net.segments.size(); ++k) {
      const LineSegment& s = net.segments[k];
      if (!net.nodes.count(s.from_node) || !net.nodes.count(s.to_node)) {
        endpoints_ok = false;
        continue;
      }
      adj[s.from_node].push_back({s.to_node, static_cast<int>(k)});
      adj[s.to_node].push_back({s.from_node, static_cast<int>(k)});
    }
    if (endpoints_ok && net.nodes.count(net.root)) {
      std::set<int> seen{net.root};
      std::deque<std::pair<int, int>> frontier{{net.root, -1}};  // (node, via)
      bool cycle = false;
      while (!frontier.empty()) {
        auto [u, via] = frontier.front();
        frontier.pop_front();
        for (auto [v, k] : adj[u]) {
          if (k == via) continue;
          if (seen.count(v)) {
            cycle = true;
            continue;
          }
          seen.insert(v);
          frontier.push_back({v, k});
        }
      }
      if (cycle) add(Violation::Kind::cycle, "segment graph contains a cycle");
      if (seen.size() != net.nodes.size()) {
        std::ostringstream os;
        os << (net.nodes.size() - seen.size()) << " node(s) unreachable from root";
        add(Violation::Kind::disconnected, os.str());
      }
    }
  }

  std::set<int> ids;
  for (const Customer& c : net.customers) {
    if (!ids.insert(c.id).second)
      add(Violation::Kind::duplicate_customer_id,
          "customer id " + std::to_string(c.id) + " appears twice");
    if (!net.nodes.count(c.node))
      add(Violation::Kind::customer_node_unknown,
          "customer " + std::to_string(c.id) + " at unknown node " +
              std::to_string(c.node));
    else if (c.node == net.root)
      add(Violation::Kind::customer_at_root,
          "customer " + std::to_string(c.id) + " sits on the root node");
    if (!finite(c.p) || !finite(c.q) || !finite(c.z_service))
      add(Violation::Kind::nonfinite_value,
          "customer " + std::to_string(c.id));
    else if (c.z_service.real() < 0.0)
      add(Violation::Kind::service_drop_negative,
          "customer " + std::to_string(c.id) + " service drop has negative resistance");
  }

  return out;
}

Radial analyze(const Network& net) {
  if (!validate_network(net).empty())
    throw std::invalid_argument("network fails structural validation");

  Radial r;
  std::map<int, std::vector<std::pair<int, int>>> adj;  // node -> (peer, seg)
  for (size_t k = 0; k < net.segments.size(); ++k) {
    const LineSegment& s = net.segments[k];
    adj[s.from_node].push_back({s.to_node, static_cast<int>(k)});
    adj[s.to_node].push_back({s.from_node, static_cast<int>(k)});
  }
  for (auto& [node, peers] : adj) std::sort(peers.begin(), peers.end());

  std::deque<int> frontier{net.root};
  std::set<int> seen{net.root};
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop_front();
    for (auto [v, k] : adj[u]) {
      if (seen.count(v)) continue;
      seen.insert(v);
      r.order.push_back({k, u, v});
      r.parent_segment[v] = k;
      r.child_segments[u].push_back(k);
      frontier.push_back(v);
    }
  }

  std::vector<int> idx(net.customers.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int lhs, int rhs) {
    return net.customers[lhs].id < net.customers[rhs].id;
  });
  r.customer_order = idx;
  for (int i : idx) r.customers_at[net.customers[i].node].push_back(i);
  return r;
}

std::vector<TraversalStep> topological_order(const Network& net) {
  return analyze(net).order;
}

Assignment resolve_assignment(const Network& net,
                              const std::map<int, Phase>& flexible_choice) {
  std::map<int, bool> flexible;
  Assignment asg;
  for (const Customer& c : net.customers) {
    flexible[c.id] = c.flexible;
    asg.phase_of[c.id] = c.initial_phase;
  }
  for (const auto& [id, phase] : flexible_choice) {
    auto it = flexible.find(id);
    if (it == flexible.end())
      throw std::invalid_argument("phase choice names unknown customer " +
                                  std::to_string(id));
    if (!it->second)
      throw std::invalid_argument("phase choice names inflexible customer " +
                                  std::to_string(id));
    asg.phase_of[id] = phase;
  }
  return asg;
}

std::vector<int> flexible_ids(const Network& net) {
  std::vector<int> out;
  for (const Customer& c : net.customers)
    if (c.flexible) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pflow
