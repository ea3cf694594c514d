#include "ctrplace/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctrplace {

MajorityRule parse_majority_rule(std::string_view text) {
  if (text == "paper") return MajorityRule::kPaper;
  if (text == "raft") return MajorityRule::kRaft;
  throw std::invalid_argument("unknown majority rule '" + std::string(text) + "'");
}

ClusterView ClusterView::with_nearest_masters(const DelayMatrix& d, Placement p,
                                              ControllerIndex leader) {
  ClusterView v{std::move(p), leader, {}};
  v.masters = assign_masters(d, v.placement);
  v.validate(d.size());
  return v;
}

void ClusterView::validate(std::size_t node_count) const {
  const auto c = static_cast<ControllerIndex>(placement.size());
  if (c == 0) throw std::invalid_argument("cluster has no controllers");
  if (leader < 0 || leader >= c) throw std::invalid_argument("leader index out of range");
  if (masters.master_of.size() != node_count) {
    throw std::invalid_argument("master assignment does not cover every node");
  }
  for (ControllerIndex m : masters.master_of) {
    if (m < 0 || m >= c) throw std::invalid_argument("master index out of range");
  }
  for (ControllerIndex k = 0; k < c; ++k) {
    if (masters.master_of.at(static_cast<std::size_t>(placement[k])) != k) {
      throw std::invalid_argument("controller must master its own hosting switch");
    }
  }
}

FlowScenario flow_from_route(std::vector<NodeId> route, double t_c_ms, double host_in_ms,
                             double host_out_ms) {
  if (route.empty()) throw std::invalid_argument("empty route");
  route.push_back(route.back());
  return {std::move(route), host_in_ms, host_out_ms, t_c_ms};
}

std::size_t majority_rank(std::size_t controllers, MajorityRule rule) {
  if (controllers <= 1) return 0;
  const std::size_t followers = controllers - 1;
  const std::size_t rank = rule == MajorityRule::kPaper ? controllers / 2 + 1 : controllers / 2;
  return std::min(rank, followers);
}

double mdo_reaction(double d_sw_ctr_ms) {
  if (!(d_sw_ctr_ms >= 0.0)) throw std::invalid_argument("delay must be non-negative");
  return 2.0 * d_sw_ctr_ms;
}

double majority_ack_delay(const DelayMatrix& d, const ClusterView& v, MajorityRule rule) {
  const std::size_t rank = majority_rank(v.placement.size(), rule);
  if (rank == 0) return 0.0;
  const NodeId leader = v.leader_node();
  std::vector<double> follower_delays;
  follower_delays.reserve(v.placement.size() - 1);
  for (ControllerIndex c = 0; c < static_cast<ControllerIndex>(v.placement.size()); ++c) {
    if (c != v.leader) follower_delays.push_back(d(leader, v.placement[c]));
  }
  std::nth_element(follower_delays.begin(), follower_delays.begin() + (rank - 1),
                   follower_delays.end());
  return follower_delays[rank - 1];
}

namespace {

double sdo_reaction_with_ack(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                             double ack) {
  const NodeId master = v.master_node(sw);
  return 2.0 * d(sw, master) + 2.0 * d(master, v.leader_node()) + 2.0 * ack;
}

}  // namespace

double sdo_reaction(const DelayMatrix& d, const ClusterView& v, NodeId sw, MajorityRule rule) {
  if (sw < 0 || static_cast<std::size_t>(sw) >= v.masters.master_of.size()) {
    throw std::out_of_range("switch id out of range");
  }
  return sdo_reaction_with_ack(d, v, sw, majority_ack_delay(d, v, rule));
}

double avg_sdo_reaction(const DelayMatrix& d, const ClusterView& v, MajorityRule rule) {
  const double ack = majority_ack_delay(d, v, rule);
  double total = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    total += sdo_reaction_with_ack(d, v, static_cast<NodeId>(s), ack);
  }
  return total / static_cast<double>(d.size());
}

double avg_mdo_reaction(const DelayMatrix& d, const Placement& p) {
  return mdo_reaction(avg_sw_ctr_delay(d, p));
}

double arp_setup_time(const DelayMatrix& d, const ClusterView& v, const FlowScenario& flow,
                      MajorityRule rule) {
  const auto& path = flow.path;
  if (path.empty()) throw std::invalid_argument("flow path is empty");
  if (path.size() < 2 || path[path.size() - 1] != path[path.size() - 2]) {
    throw std::invalid_argument("flow path must end with the last switch repeated");
  }
  if (flow.t_c_ms < 0.0 || flow.host_in_ms < 0.0 || flow.host_out_ms < 0.0) {
    throw std::invalid_argument("flow delays must be non-negative");
  }
  for (NodeId s : path) {
    if (s < 0 || static_cast<std::size_t>(s) >= v.masters.master_of.size()) {
      throw std::invalid_argument("path switch " + std::to_string(s) + " has no master");
    }
  }
  double host_to_host = flow.host_in_ms + flow.host_out_ms;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) host_to_host += d(path[k], path[k + 1]);

  const NodeId leader = v.leader_node();
  double per_switch = 0.0;
  for (NodeId s : path) {
    const NodeId master = v.master_node(s);
    per_switch += 2.0 * d(s, master) + 2.0 * d(master, leader);
  }
  const auto updates = static_cast<double>(path.size());
  return 2.0 * host_to_host + per_switch + 2.0 * updates * majority_ack_delay(d, v, rule) +
         updates * flow.t_c_ms;
}

OwnerSweep owner_sweep(const DelayMatrix& d, const Placement& p, MajorityRule rule) {
  OwnerSweep out;
  const auto c = static_cast<ControllerIndex>(p.size());
  const MasterAssignment masters = assign_masters(d, p);
  for (ControllerIndex leader = 0; leader < c; ++leader) {
    ClusterView v{p, leader, masters};
    out.avg_reaction_ms.push_back(avg_sdo_reaction(d, v, rule));
  }
  const auto& vals = out.avg_reaction_ms;
  out.optimal = static_cast<ControllerIndex>(std::min_element(vals.begin(), vals.end()) -
                                             vals.begin());
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  auto ratio = [&](double num) {
    if (sorted.front() == 0.0) {
      return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return num / sorted.front();
  };
  if (sorted.size() > 1) {
    out.min_reduction = ratio(sorted[1]);
    out.max_reduction = ratio(sorted.back());
  }
  return out;
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : kAllScenarios) {
    if (scenario_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected TT, TMC, TMF, TPC or TPF)");
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kTT: return "TT";
    case Scenario::kTMC: return "TMC";
    case Scenario::kTMF: return "TMF";
    case Scenario::kTPC: return "TPC";
    case Scenario::kTPF: return "TPF";
  }
  return "?";
}

ScenarioSetup build_scenario(Scenario s, std::size_t n_sw, double t_c_ms) {
  if (n_sw < 3 || n_sw > 36) throw std::invalid_argument("n_sw must lie in [3, 36]");

  // Two sites: Turin (hosting the emulated network) and a remote node.
  // Entities on the same site talk over the local hypervisor.
  double remote = kTurinMilanDelayMs;
  bool f1_remote = false;
  bool leader_remote = true;
  bool f2_remote = true;
  switch (s) {
    case Scenario::kTT: leader_remote = f2_remote = false; break;
    case Scenario::kTMC: break;
    case Scenario::kTMF: f1_remote = true; break;
    case Scenario::kTPC: remote = kTurinPisaDelayMs; break;
    case Scenario::kTPF: remote = kTurinPisaDelayMs; f1_remote = true; break;
  }

  const std::size_t n = n_sw + 3;
  const std::size_t f1 = n_sw;
  const std::size_t leader = n_sw + 1;
  const std::size_t f2 = n_sw + 2;
  std::vector<bool> is_remote(n, false);
  is_remote[f1] = f1_remote;
  is_remote[leader] = leader_remote;
  is_remote[f2] = f2_remote;

  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || (i < n_sw && j < n_sw)) continue;
      rows[i][j] = is_remote[i] != is_remote[j] ? remote : kLocalVmDelayMs;
    }
  }

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < n_sw; ++k) {
    nodes.push_back({static_cast<NodeId>(k), "s" + std::to_string(k + 1), std::nullopt});
    if (k > 0) edges.push_back({static_cast<NodeId>(k - 1), static_cast<NodeId>(k), 0.0});
  }
  Topology network(std::string(scenario_name(s)), std::move(nodes), std::move(edges));

  Placement p({static_cast<NodeId>(f1), static_cast<NodeId>(leader), static_cast<NodeId>(f2)}, n);
  MasterAssignment masters;
  masters.master_of.assign(n, 0);
  masters.master_of[leader] = 1;
  masters.master_of[f2] = 2;
  ClusterView view{std::move(p), 1, std::move(masters)};
  view.validate(n);

  std::vector<NodeId> route;
  for (std::size_t k = 0; k < n_sw; ++k) route.push_back(static_cast<NodeId>(k));
  return {std::move(network), DelayMatrix::from_rows(rows), std::move(view),
          flow_from_route(std::move(route), t_c_ms)};
}

double scenario_table(Scenario s, std::size_t n_sw, double t_c_ms, MajorityRule rule) {
  const ScenarioSetup setup = build_scenario(s, n_sw, t_c_ms);
  return arp_setup_time(setup.delays, setup.view, setup.flow, rule);
}

}  // namespace ctrplace
