#include "pflow/ltupf.hpp"

#include <algorithm>
#include <stdexcept>

namespace pflow {

bool VoltageBox::contains(Phase phase, const Phasor& v) const {
  constexpr double guard = 1e-9;
  double vm = std::abs(v);
  if (vm < v_min - guard || vm > v_max + guard) return false;
  double dva = wrap_angle(std::arg(v) - delta_center[phase_index(phase)]);
  return std::abs(dva) <= delta_halfwidth + guard;
}

namespace {

int index_of(const std::vector<int>& ids, int id, const char* what) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id)
    throw std::out_of_range(std::string("unknown ") + what + " id " +
                            std::to_string(id));
  return static_cast<int>(it - ids.begin());
}

}  // namespace

int LtupfSystem::col_node(int node_id, Phase phase) const {
  return 6 * index_of(node_ids, node_id, "node") + 2 * phase_index(phase);
}

int LtupfSystem::col_segment(int segment, Phase phase) const {
  return 6 * static_cast<int>(node_ids.size()) + 6 * segment +
         2 * phase_index(phase);
}

int LtupfSystem::col_customer_u(int customer_id) const {
  return 6 * static_cast<int>(node_ids.size()) + 6 * segment_count +
         6 * index_of(customer_ids, customer_id, "customer");
}

int LtupfSystem::col_customer_v(int customer_id) const {
  return col_customer_u(customer_id) + 2;
}

int LtupfSystem::col_customer_i(int customer_id) const {
  return col_customer_u(customer_id) + 4;
}

LtupfSystem assemble_ltupf(const Network& net, const Assignment& asg,
                           const LinCoeffs& coeffs) {
  if (!region_well_formed(coeffs.region))
    throw std::invalid_argument("linearization region is malformed");
  Radial radial = analyze(net);
  for (const Customer& c : net.customers)
    if (!asg.contains(c.id))
      throw std::invalid_argument("assignment misses customer " +
                                  std::to_string(c.id));

  LtupfSystem sys;
  sys.node_ids.assign(net.nodes.begin(), net.nodes.end());
  for (int i : radial.customer_order)
    sys.customer_ids.push_back(net.customers[i].id);
  sys.segment_count = static_cast<int>(net.segments.size());

  const int dim = 6 * static_cast<int>(sys.node_ids.size()) +
                  6 * sys.segment_count +
                  6 * static_cast<int>(sys.customer_ids.size());
  sys.a = Eigen::MatrixXd::Zero(dim, dim);
  sys.b = Eigen::VectorXd::Zero(dim);

  int row = 0;
  // Emit one complex-linear equation sum_k coeff_k * var_k = rhs as two real
  // rows over the (re, im) component columns.
  auto emit = [&](const std::vector<std::pair<Phasor, int>>& terms,
                  const Phasor& rhs) {
    for (const auto& [coeff, col] : terms) {
      sys.a(row, col) += coeff.real();
      sys.a(row, col + 1) -= coeff.imag();
      sys.a(row + 1, col) += coeff.imag();
      sys.a(row + 1, col + 1) += coeff.real();
    }
    sys.b[row] = rhs.real();
    sys.b[row + 1] = rhs.imag();
    row += 2;
  };

  const Phasor one(1.0, 0.0);

  // Root voltage pins.
  for (Phase ph : all_phases)
    emit({{one, sys.col_node(net.root, ph)}}, net.root_voltage[phase_index(ph)]);

  // Voltage drop across every segment, traversal order, full 3x3 coupling:
  // V_parent - V_child - Z * I_segment = 0, currents oriented parent->child.
  for (const TraversalStep& ts : radial.order) {
    const Matrix3cd& z = net.segments[ts.segment].z;
    for (Phase ph : all_phases) {
      std::vector<std::pair<Phasor, int>> terms{
          {one, sys.col_node(ts.parent, ph)},
          {-one, sys.col_node(ts.child, ph)}};
      for (Phase ps : all_phases)
        terms.push_back({-z(phase_index(ph), phase_index(ps)),
                         sys.col_segment(ts.segment, ps)});
      emit(terms, {0.0, 0.0});
    }
  }

  // Current balance at every non-root node: inflow from the parent segment
  // equals child-segment outflow plus customer draw on the matching phase.
  for (int node : sys.node_ids) {
    if (node == net.root) continue;
    int parent_seg = radial.parent_segment.at(node);
    for (Phase ph : all_phases) {
      std::vector<std::pair<Phasor, int>> terms{
          {one, sys.col_segment(parent_seg, ph)}};
      auto kids = radial.child_segments.find(node);
      if (kids != radial.child_segments.end())
        for (int k : kids->second)
          terms.push_back({-one, sys.col_segment(k, ph)});
      auto bucket = radial.customers_at.find(node);
      if (bucket != radial.customers_at.end())
        for (int i : bucket->second)
          if (asg.at(net.customers[i].id) == ph)
            terms.push_back({-one, sys.col_customer_i(net.customers[i].id)});
      emit(terms, {0.0, 0.0});
    }
  }

  // Per-customer rows, ascending id.
  for (int i : radial.customer_order) {
    const Customer& c = net.customers[i];
    Phase ph = asg.at(c.id);
    int u = sys.col_customer_u(c.id);
    int v = sys.col_customer_v(c.id);
    int cur = sys.col_customer_i(c.id);

    // Node-side terminal picks up the assigned phase's node voltage.
    emit({{one, u}, {-one, sys.col_node(c.node, ph)}}, {0.0, 0.0});
    // Service drop: U - V = z_service * I.
    emit({{one, u}, {-one, v}, {-c.z_service, cur}}, {0.0, 0.0});

    // Linearized power balance I = (p - jq) * (fX(V) + j fY(V)) with the
    // affine surrogate of 1/conj(V). The surrogate mixes Re V and Im V
    // without the conjugate-linear structure, so these two rows are written
    // directly on components:
    //   Re I - (p*kx + q*hx) X - (p*ky + q*hy) Y = p*bx + q*by
    //   Im I - (p*hx - q*kx) X - (p*hy - q*ky) Y = p*by - q*bx
    const PhaseCoeffs& lc = coeffs.phase[phase_index(ph)];
    sys.a(row, cur) = 1.0;
    sys.a(row, v) -= c.p * lc.kx + c.q * lc.hx;
    sys.a(row, v + 1) -= c.p * lc.ky + c.q * lc.hy;
    sys.b[row] = c.p * lc.bx + c.q * lc.by;
    ++row;
    sys.a(row, cur + 1) = 1.0;
    sys.a(row, v) -= c.p * lc.hx - c.q * lc.kx;
    sys.a(row, v + 1) -= c.p * lc.hy - c.q * lc.ky;
    sys.b[row] = c.p * lc.by - c.q * lc.bx;
    ++row;
  }

  if (row != dim) throw std::logic_error("ltupf assembly is not square");
  return sys;
}

LtupfSolution solve_ltupf(const LtupfSystem& system, const VoltageBox& box) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.a);
  Eigen::VectorXd x = lu.solve(system.b);
  if (!x.allFinite())
    throw std::runtime_error("linearized system is numerically singular");
  LtupfSolution sol;
  sol.residual = max_abs(system.a * x - system.b);
  if (!(sol.residual < 1e-6))
    throw std::runtime_error("linearized system is numerically singular");

  auto complex_at = [&](int col) { return Phasor(x[col], x[col + 1]); };

  sol.feasible = true;
  for (int node : system.node_ids) {
    Vector3cd v;
    for (Phase ph : all_phases) {
      v[phase_index(ph)] = complex_at(system.col_node(node, ph));
      if (!box.contains(ph, v[phase_index(ph)])) sol.feasible = false;
    }
    sol.node_voltage[node] = v;
  }
  for (int id : system.customer_ids) {
    sol.customer_voltage[id] = complex_at(system.col_customer_v(id));
    sol.customer_current[id] = complex_at(system.col_customer_i(id));
  }
  for (int k = 0; k < system.segment_count; ++k) {
    Vector3cd i;
    for (Phase ph : all_phases)
      i[phase_index(ph)] = complex_at(system.col_segment(k, ph));
    sol.segment_current[k] = i;
  }
  return sol;
}

double imbalance_objective(const Network& net, const Assignment& asg) {
  Radial radial = analyze(net);
  Vector3d p_sum = Vector3d::Zero(), q_sum = Vector3d::Zero();
  for (int i : radial.customer_order) {
    const Customer& c = net.customers[i];
    int ph = phase_index(asg.at(c.id));
    p_sum[ph] += c.p;
    q_sum[ph] += c.q;
  }
  double ux = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      ux = std::max(ux, std::abs(p_sum[i] - p_sum[j]));
      ux = std::max(ux, std::abs(q_sum[i] - q_sum[j]));
    }
  return ux;
}

namespace {

// Candidate = one phase choice per searched customer, packed as a base-3
// code whose most-significant digit is the smallest customer id; ascending
// code order is therefore the lexicographic (customer id, phase a<b<c)
// tie-break order.
struct Candidate {
  double ux;
  uint32_t code;
};

}  // namespace

SearchOutcome assignment_search(const Network& net, const LinCoeffs& coeffs,
                                const VoltageBox& box,
                                const std::vector<int>& flexible,
                                const SearchOptions& opts) {
  Radial radial = analyze(net);

  std::vector<int> search_ids = flexible;
  std::sort(search_ids.begin(), search_ids.end());
  search_ids.erase(std::unique(search_ids.begin(), search_ids.end()),
                   search_ids.end());
  for (int id : search_ids) {
    const Customer* c = net.find_customer(id);
    if (!c || !c->flexible)
      throw std::invalid_argument("search set names non-flexible customer " +
                                  std::to_string(id));
  }
  const int f = static_cast<int>(search_ids.size());
  if (f > opts.flex_cap)
    throw std::length_error("flexible customer count " + std::to_string(f) +
                            " exceeds the enumeration cap " +
                            std::to_string(opts.flex_cap));

  // U_x of a candidate, accumulated over all customers in ascending id order
  // (identical arithmetic to imbalance_objective on the resolved assignment).
  std::vector<int> pos_of_searched(net.customers.size(), -1);
  for (size_t i = 0; i < net.customers.size(); ++i) {
    auto it = std::lower_bound(search_ids.begin(), search_ids.end(),
                               net.customers[i].id);
    if (it != search_ids.end() && *it == net.customers[i].id)
      pos_of_searched[i] = static_cast<int>(it - search_ids.begin());
  }
  auto candidate_ux = [&](const std::vector<uint8_t>& phases) {
    Vector3d p_sum = Vector3d::Zero(), q_sum = Vector3d::Zero();
    for (int i : radial.customer_order) {
      const Customer& c = net.customers[i];
      int ph = pos_of_searched[i] >= 0 ? phases[pos_of_searched[i]]
                                       : phase_index(c.initial_phase);
      p_sum[ph] += c.p;
      q_sum[ph] += c.q;
    }
    double ux = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        ux = std::max(ux, std::abs(p_sum[i] - p_sum[j]));
        ux = std::max(ux, std::abs(q_sum[i] - q_sum[j]));
      }
    return ux;
  };

  // Enumerate all 3^f candidates; incrementing the last position first means
  // candidate t carries exactly the base-3 code t.
  long total = 1;
  for (int i = 0; i < f; ++i) total *= 3;
  std::vector<Candidate> candidates;
  candidates.reserve(total);
  std::vector<uint8_t> phases(f, 0);
  for (long t = 0; t < total; ++t) {
    candidates.push_back({candidate_ux(phases), static_cast<uint32_t>(t)});
    for (int i = f - 1; i >= 0; --i) {
      if (++phases[i] < 3) break;
      phases[i] = 0;
    }
  }
  // Ascending objective, exact ties in lexicographic candidate order.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& lhs, const Candidate& rhs) {
              return lhs.ux < rhs.ux ||
                     (lhs.ux == rhs.ux && lhs.code < rhs.code);
            });

  auto decode = [&](uint32_t code) {
    std::vector<uint8_t> out(f);
    for (int i = f - 1; i >= 0; --i) {
      out[i] = code % 3;
      code /= 3;
    }
    return out;
  };

  SearchOutcome out;
  for (const Candidate& cand : candidates) {
    std::vector<uint8_t> cand_phases = decode(cand.code);
    std::map<int, Phase> choice;
    for (int i = 0; i < f; ++i)
      choice[search_ids[i]] = all_phases[cand_phases[i]];
    Assignment asg = resolve_assignment(net, choice);
    LtupfSolution sol = solve_ltupf(assemble_ltupf(net, asg, coeffs), box);
    ++out.explored;
    out.ux_stream.push_back(cand.ux);
    out.max_residual = std::max(out.max_residual, sol.residual);
    if (sol.feasible) {
      out.status = SearchOutcome::Status::optimal;
      out.best_assignment = std::move(asg);
      out.best_solution = std::move(sol);
      out.best_ux = cand.ux;
      break;
    }
  }
  return out;
}

SearchOutcome assignment_search(const Network& net, const LinCoeffs& coeffs,
                                const VoltageBox& box,
                                const SearchOptions& opts) {
  return assignment_search(net, coeffs, box, flexible_ids(net), opts);
}

}  // namespace pflow
