#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctrplace/placement.hpp"
#include "ctrplace/topology.hpp"

namespace ctrplace {

/// Which follower's log reply completes the commit quorum.
///  - kPaper: the floor(C/2 + 1)-th closest follower.
///  - kRaft:  the floor(C/2)-th closest follower (leader plus floor(C/2)
///            followers form a strict majority).
/// Both clamp to the number of followers.
enum class MajorityRule { kPaper, kRaft };

MajorityRule parse_majority_rule(std::string_view text);

/// A placement, the data owner (Raft leader) and the switch -> master map.
struct ClusterView {
  Placement placement;
  ControllerIndex leader = 0;
  MasterAssignment masters;

  /// Masters by nearest controller.
  static ClusterView with_nearest_masters(const DelayMatrix& d, Placement p,
                                          ControllerIndex leader);

  /// Throws std::invalid_argument if leader or masters are inconsistent.
  void validate(std::size_t node_count) const;

  NodeId leader_node() const { return placement[leader]; }
  NodeId master_node(NodeId sw) const {
    return placement[masters.master_of.at(static_cast<std::size_t>(sw))];
  }
};

/// Switch sequence of an l2-switch flow; the last switch appears twice.
struct FlowScenario {
  std::vector<NodeId> path;
  double host_in_ms = 0.0;   // H1 -> first switch
  double host_out_ms = 0.0;  // last switch -> H2
  double t_c_ms = 20.0;      // controller processing per update
};

/// Builds the |P| list from a routing path src..dst by repeating dst.
FlowScenario flow_from_route(std::vector<NodeId> route, double t_c_ms,
                             double host_in_ms = 0.0, double host_out_ms = 0.0);

/// 1-based rank of the follower whose reply completes the quorum, 0 if the
/// cluster has no followers.
std::size_t majority_rank(std::size_t controllers, MajorityRule rule);

/// Reaction time when each controller updates its own replica: 2 d_sw-ctr.
double mdo_reaction(double d_sw_ctr_ms);

/// Delay from the leader to the quorum-completing follower.
double majority_ack_delay(const DelayMatrix& d, const ClusterView& v,
                          MajorityRule rule = MajorityRule::kPaper);

/// Reaction time seen by `sw` when all writes go through the leader:
/// 2 d_sw-ctr + 2 d_ctr-leader + 2 d_ctr*-leader.
double sdo_reaction(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                    MajorityRule rule = MajorityRule::kPaper);

double avg_sdo_reaction(const DelayMatrix& d, const ClusterView& v,
                        MajorityRule rule = MajorityRule::kPaper);

double avg_mdo_reaction(const DelayMatrix& d, const Placement& p);

/// ARP reaction time of the l2-switch application:
///   2 d_H1,H2 + sum_s (2 d_s,c(s) + 2 d_c(s),L) + 2|P| d_ack + |P| t_c
/// where d_H1,H2 runs along the route including both host links.
double arp_setup_time(const DelayMatrix& d, const ClusterView& v, const FlowScenario& flow,
                      MajorityRule rule = MajorityRule::kPaper);

struct OwnerSweep {
  std::vector<double> avg_reaction_ms;  // per leader index
  ControllerIndex optimal = 0;          // argmin, lowest index on ties
  double min_reduction = 1.0;           // d_2 / d_1 over sorted values
  double max_reduction = 1.0;           // d_C / d_1
};

/// Average SDO reaction for every choice of leader (nearest-master rule).
/// Reduction factors are +inf when d_1 = 0 < d_k, and 1 when both are 0.
OwnerSweep owner_sweep(const DelayMatrix& d, const Placement& p,
                       MajorityRule rule = MajorityRule::kPaper);

// Testbed layouts: where the emulated network, leader L and followers F1, F2
// run. F1 masters every switch.
enum class Scenario { kTT, kTMC, kTMF, kTPC, kTPF };

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);
inline constexpr Scenario kAllScenarios[] = {Scenario::kTT, Scenario::kTMC, Scenario::kTMF,
                                             Scenario::kTPC, Scenario::kTPF};

inline constexpr double kDefaultTcMs = 20.0;
inline constexpr double kLocalVmDelayMs = 0.25;
inline constexpr double kTurinMilanDelayMs = 2.0;
inline constexpr double kTurinPisaDelayMs = 66.0;

/// Linear emulated network of n_sw switches (zero hop delay, hosts at both
/// ends) plus three controller nodes F1 = n_sw, L = n_sw + 1, F2 = n_sw + 2.
struct ScenarioSetup {
  Topology network;  // switches only
  DelayMatrix delays;  // switches and controllers
  ClusterView view;
  FlowScenario flow;
};

/// n_sw must lie in [3, 36].
ScenarioSetup build_scenario(Scenario s, std::size_t n_sw, double t_c_ms = kDefaultTcMs);

/// Predicted flow setup time for the scenario.
double scenario_table(Scenario s, std::size_t n_sw, double t_c_ms = kDefaultTcMs,
                      MajorityRule rule = MajorityRule::kPaper);

}  // namespace ctrplace
