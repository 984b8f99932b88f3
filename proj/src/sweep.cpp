#include "pflow/sweep.hpp"

#include <stdexcept>

namespace pflow {

Phasor customer_injection(const Phasor& v_customer, double p, double q) {
  if (std::abs(v_customer) == 0.0)
    throw std::domain_error("customer voltage has zero magnitude");
  return Phasor(p, -q) / std::conj(v_customer);
}

SolveResult ntupf_solve(const Network& net, const Assignment& asg,
                        const SweepOptions& opts) {
  if (opts.tol <= 0.0 || opts.max_iter < 1 || opts.v_floor <= 0.0 ||
      opts.v_floor >= 1.0)
    throw std::invalid_argument("invalid sweep options");
  Radial radial = analyze(net);  // throws on invalid networks
  for (const Customer& c : net.customers)
    if (!asg.contains(c.id))
      throw std::invalid_argument("assignment misses customer " +
                                  std::to_string(c.id));

  const size_t n_cust = net.customers.size();
  std::vector<int> cust_phase(n_cust);
  for (size_t i = 0; i < n_cust; ++i)
    cust_phase[i] = phase_index(asg.at(net.customers[i].id));

  // Flat start.
  std::map<int, Vector3cd> v_node;
  for (int n : net.nodes) v_node[n] = net.root_voltage;
  std::vector<Phasor> v_cust(n_cust), i_cust(n_cust, Phasor(0.0, 0.0));
  for (size_t i = 0; i < n_cust; ++i)
    v_cust[i] = net.root_voltage[cust_phase[i]];
  std::vector<Vector3cd> i_seg(net.segments.size(), Vector3cd::Zero());

  SolveResult res;
  bool collapsed = false;
  while (res.iterations < opts.max_iter && !collapsed) {
    ++res.iterations;

    // (i) Customer currents, service drop lagged one iteration.
    for (int i : radial.customer_order) {
      const Customer& c = net.customers[i];
      Phasor u = v_node[c.node][cust_phase[i]];
      Phasor v = u - c.z_service * i_cust[i];
      if (std::abs(v) < opts.v_floor) {
        collapsed = true;
        break;
      }
      v_cust[i] = v;
      i_cust[i] = customer_injection(v, c.p, c.q);
    }
    if (collapsed) break;

    // (ii) Backward sweep: accumulate segment currents leaf-to-root.
    for (auto& s : i_seg) s.setZero();
    for (auto it = radial.order.rbegin(); it != radial.order.rend(); ++it) {
      Vector3cd acc = Vector3cd::Zero();
      auto bucket = radial.customers_at.find(it->child);
      if (bucket != radial.customers_at.end())
        for (int i : bucket->second) acc[cust_phase[i]] += i_cust[i];
      auto kids = radial.child_segments.find(it->child);
      if (kids != radial.child_segments.end())
        for (int k : kids->second) acc += i_seg[k];
      i_seg[it->segment] = acc;
    }

    // (iii) Forward sweep: voltage drop across each segment.
    double step = 0.0;
    std::map<int, Vector3cd> v_new;
    v_new[net.root] = net.root_voltage;
    for (const TraversalStep& ts : radial.order) {
      Vector3cd v = v_new[ts.parent] - net.segments[ts.segment].z * i_seg[ts.segment];
      step = std::max(step, max_abs(v - v_node[ts.child]));
      if (v.cwiseAbs().minCoeff() < opts.v_floor) collapsed = true;
      v_new[ts.child] = v;
    }
    v_node = std::move(v_new);
    res.step_sizes.push_back(step);
    if (collapsed) break;
    if (step < opts.tol) {
      res.converged = true;
      break;
    }
  }

  res.node_voltage = std::move(v_node);
  for (size_t i = 0; i < n_cust; ++i) {
    res.customer_voltage[net.customers[i].id] = v_cust[i];
    res.customer_current[net.customers[i].id] = i_cust[i];
  }
  for (size_t k = 0; k < net.segments.size(); ++k)
    res.segment_current[static_cast<int>(k)] = i_seg[k];
  return res;
}

}  // namespace pflow
