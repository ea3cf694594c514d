#include <doctest.h>

#include <algorithm>
#include <random>

#include "ctrplace/reaction.hpp"

using namespace ctrplace;

namespace {

DelayMatrix lin8() { return all_pairs_delays(linear_topology(8, 1.0)); }

// Per-switch oracle written out from the model definition.
double oracle_sdo(const DelayMatrix& d, const std::vector<NodeId>& ctrs, int leader, NodeId sw,
                  std::size_t rank) {
  std::size_t master = 0;
  for (std::size_t k = 1; k < ctrs.size(); ++k) {
    if (d(sw, ctrs[k]) < d(sw, ctrs[master])) master = k;
  }
  const NodeId l = ctrs[static_cast<std::size_t>(leader)];
  std::vector<double> f;
  for (std::size_t k = 0; k < ctrs.size(); ++k) {
    if (static_cast<int>(k) != leader) f.push_back(d(l, ctrs[k]));
  }
  std::sort(f.begin(), f.end());
  const double ack = rank == 0 ? 0.0 : f[rank - 1];
  return 2 * d(sw, ctrs[master]) + 2 * d(ctrs[master], l) + 2 * ack;
}

}  // namespace

TEST_CASE("majority rank") {
  CHECK(majority_rank(1, MajorityRule::kPaper) == 0);
  CHECK(majority_rank(2, MajorityRule::kPaper) == 1);  // clamped
  CHECK(majority_rank(3, MajorityRule::kPaper) == 2);
  CHECK(majority_rank(5, MajorityRule::kPaper) == 3);
  CHECK(majority_rank(4, MajorityRule::kPaper) == 3);
  CHECK(majority_rank(1, MajorityRule::kRaft) == 0);
  CHECK(majority_rank(2, MajorityRule::kRaft) == 1);
  CHECK(majority_rank(3, MajorityRule::kRaft) == 1);
  CHECK(majority_rank(5, MajorityRule::kRaft) == 2);
  CHECK(parse_majority_rule("raft") == MajorityRule::kRaft);
  CHECK_THROWS_AS(parse_majority_rule("quorum"), std::invalid_argument);
}

TEST_CASE("mdo_reaction") {
  CHECK(mdo_reaction(0.0) == 0.0);
  CHECK(mdo_reaction(2.0) == 4.0);
  CHECK(mdo_reaction(66.0) == 132.0);
  CHECK_THROWS_AS(mdo_reaction(-1.0), std::invalid_argument);
}

TEST_CASE("majority_ack_delay") {
  // Leader 0; followers at 0.25 and 2.0.
  const DelayMatrix d3 = DelayMatrix::from_rows({{0, 0.25, 2}, {0.25, 0, 2}, {2, 2, 0}});
  const ClusterView v3 = ClusterView::with_nearest_masters(d3, Placement({0, 1, 2}, 3), 0);
  CHECK(majority_ack_delay(d3, v3) == 2.0);
  CHECK(majority_ack_delay(d3, v3, MajorityRule::kRaft) == 0.25);

  // Star around the leader: followers at 1, 2, 3, 4.
  std::vector<std::vector<double>> rows(5, std::vector<double>(5, 0.0));
  for (int i = 1; i < 5; ++i) {
    rows[0][static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)][0] = i;
    for (int j = 1; j < 5; ++j) {
      if (i != j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = i + j;
    }
  }
  const DelayMatrix d5 = DelayMatrix::from_rows(rows);
  const ClusterView v5 = ClusterView::with_nearest_masters(d5, Placement({0, 4, 2, 1, 3}, 5), 0);
  CHECK(majority_ack_delay(d5, v5) == 3.0);
  CHECK(majority_ack_delay(d5, v5, MajorityRule::kRaft) == 2.0);

  const ClusterView v1 = ClusterView::with_nearest_masters(d5, Placement({2}, 5), 0);
  CHECK(majority_ack_delay(d5, v1) == 0.0);
}

TEST_CASE("sdo_reaction worked examples") {
  // sw=0, master F=1, leader L=2, other follower 3.
  const DelayMatrix a = DelayMatrix::from_rows(
      {{0, 0.25, 2.25, 2.25}, {0.25, 0, 2, 2}, {2.25, 2, 0, 2}, {2.25, 2, 2, 0}});
  const ClusterView va = ClusterView::with_nearest_masters(a, Placement({1, 2, 3}, 4), 1);
  CHECK(sdo_reaction(a, va, 0) == doctest::Approx(8.5));

  // Master is the leader: 2*1 + 0 + 2*3.
  const DelayMatrix b =
      DelayMatrix::from_rows({{0, 1, 3, 3}, {1, 0, 3, 3}, {3, 3, 0, 3}, {3, 3, 3, 0}});
  const ClusterView vb = ClusterView::with_nearest_masters(b, Placement({1, 2, 3}, 4), 0);
  CHECK(sdo_reaction(b, vb, 0) == doctest::Approx(8.0));

  const DelayMatrix z = DelayMatrix::from_rows({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  const ClusterView vz = ClusterView::with_nearest_masters(z, Placement({0, 1, 2}, 3), 2);
  for (NodeId s = 0; s < 3; ++s) CHECK(sdo_reaction(z, vz, s) == 0.0);
  CHECK(avg_sdo_reaction(z, vz) == 0.0);
  CHECK_THROWS_AS(sdo_reaction(z, vz, 3), std::out_of_range);
}

TEST_CASE("single controller reduces to twice the Sw-Ctr delay") {
  const DelayMatrix d = lin8();
  for (NodeId c = 0; c < 8; ++c) {
    const Placement p({c}, 8);
    const ClusterView v = ClusterView::with_nearest_masters(d, p, 0);
    CHECK(avg_sdo_reaction(d, v) == doctest::Approx(2.0 * avg_sw_ctr_delay(d, p)));
    CHECK(avg_mdo_reaction(d, p) == doctest::Approx(2.0 * avg_sw_ctr_delay(d, p)));
    for (NodeId s = 0; s < 8; ++s) CHECK(sdo_reaction(d, v, s) == 2.0 * d(s, c));
  }
}

TEST_CASE("avg_sdo_reaction matches per-switch enumeration") {
  const DelayMatrix d = lin8();
  const std::vector<NodeId> ctrs{1, 5};
  const ClusterView v = ClusterView::with_nearest_masters(d, Placement(ctrs, 8), 0);
  double total = 0.0;
  for (NodeId s = 0; s < 8; ++s) total += oracle_sdo(d, ctrs, 0, s, 1);
  CHECK(avg_sdo_reaction(d, v) == doctest::Approx(total / 8.0));

  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    std::vector<Edge> edges;
    std::vector<Node> nodes;
    for (int k = 0; k < n; ++k) nodes.push_back({k, "", std::nullopt});
    for (int k = 1; k < n; ++k) {
      edges.push_back({std::uniform_int_distribution<int>(0, k - 1)(rng), k,
                       std::uniform_real_distribution<double>(0.1, 5.0)(rng)});
    }
    const DelayMatrix dr = all_pairs_delays(Topology("r", nodes, edges));
    std::vector<NodeId> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const int c = std::uniform_int_distribution<int>(1, n)(rng);
    all.resize(static_cast<std::size_t>(c));
    const int leader = std::uniform_int_distribution<int>(0, c - 1)(rng);
    const ClusterView vr =
        ClusterView::with_nearest_masters(dr, Placement(all, static_cast<std::size_t>(n)), leader);
    for (const auto rule : {MajorityRule::kPaper, MajorityRule::kRaft}) {
      const std::size_t rank = majority_rank(static_cast<std::size_t>(c), rule);
      double sum = 0.0;
      for (NodeId s = 0; s < n; ++s) {
        const double o = oracle_sdo(dr, all, leader, s, rank);
        CHECK(sdo_reaction(dr, vr, s, rule) == doctest::Approx(o));
        sum += o;
      }
      CHECK(avg_sdo_reaction(dr, vr, rule) == doctest::Approx(sum / n));
    }
  }
}

TEST_CASE("owner_sweep") {
  const DelayMatrix d = lin8();
  const std::vector<NodeId> ctrs{0, 3, 7};
  const OwnerSweep s = owner_sweep(d, Placement(ctrs, 8));
  REQUIRE(s.avg_reaction_ms.size() == 3);
  std::vector<double> oracle;
  for (int l = 0; l < 3; ++l) {
    double total = 0.0;
    for (NodeId sw = 0; sw < 8; ++sw) total += oracle_sdo(d, ctrs, l, sw, 2);
    oracle.push_back(total / 8.0);
    CHECK(s.avg_reaction_ms[static_cast<std::size_t>(l)] == doctest::Approx(oracle.back()));
  }
  CHECK(s.optimal == 1);
  std::sort(oracle.begin(), oracle.end());
  CHECK(s.min_reduction == doctest::Approx(oracle[1] / oracle[0]));
  CHECK(s.max_reduction == doctest::Approx(oracle[2] / oracle[0]));

  const DelayMatrix tri = all_pairs_delays(
      Topology("t", {{0, "", {}}, {1, "", {}}, {2, "", {}}}, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}));
  const OwnerSweep eq = owner_sweep(tri, Placement({0, 1, 2}, 3));
  CHECK(eq.avg_reaction_ms[0] == eq.avg_reaction_ms[1]);
  CHECK(eq.avg_reaction_ms[1] == eq.avg_reaction_ms[2]);
  CHECK(eq.optimal == 0);
  CHECK(eq.min_reduction == 1.0);
  CHECK(eq.max_reduction == 1.0);

  const OwnerSweep one = owner_sweep(d, Placement({4}, 8));
  CHECK(one.avg_reaction_ms.size() == 1);
  CHECK(one.min_reduction == 1.0);
  CHECK(one.max_reduction == 1.0);
}

TEST_CASE("arp_setup_time preconditions") {
  const DelayMatrix d = lin8();
  const ClusterView v = ClusterView::with_nearest_masters(d, Placement({1, 5}, 8), 0);
  FlowScenario empty;
  CHECK_THROWS_AS(arp_setup_time(d, v, empty), std::invalid_argument);
  FlowScenario no_repeat{{0, 1, 2}, 0, 0, 20};
  CHECK_THROWS_AS(arp_setup_time(d, v, no_repeat), std::invalid_argument);
  CHECK_THROWS_AS(flow_from_route({}, 20), std::invalid_argument);
  const FlowScenario f = flow_from_route({0, 1, 2}, 20);
  CHECK(f.path == std::vector<NodeId>{0, 1, 2, 2});
}

TEST_CASE("arp_setup_time on a linear net with one controller") {
  // One controller at node 0: every update pays 2 d(s,0), no leader or ack terms.
  const DelayMatrix d = lin8();
  const ClusterView v = ClusterView::with_nearest_masters(d, Placement({0}, 8), 0);
  const FlowScenario f = flow_from_route({2, 3, 4}, 5.0, 0.5, 0.25);
  const double h = 0.5 + 0.25 + 2.0;
  const double expect = 2 * h + 2 * (2 + 3 + 4 + 4) + 4 * 5.0;
  CHECK(arp_setup_time(d, v, f) == doctest::Approx(expect));
}

TEST_CASE("testbed scenarios") {
  // Per-update cost: 2 d_sw-master + 2 d_master-leader + 2 d_ack + t_c.
  struct Row {
    Scenario s;
    double per_update;
    double per_update_raft;
  };
  const Row rows[] = {
      {Scenario::kTT, 0.5 + 0.5 + 0.5 + 20, 0.5 + 0.5 + 0.5 + 20},
      {Scenario::kTMC, 0.5 + 4 + 4 + 20, 0.5 + 4 + 0.5 + 20},
      {Scenario::kTMF, 4 + 0.5 + 0.5 + 20, 4 + 0.5 + 0.5 + 20},
      {Scenario::kTPC, 0.5 + 132 + 132 + 20, 0.5 + 132 + 0.5 + 20},
      {Scenario::kTPF, 132 + 0.5 + 0.5 + 20, 132 + 0.5 + 0.5 + 20},
  };
  for (const auto& r : rows) {
    CAPTURE(scenario_name(r.s));
    for (std::size_t n = 3; n <= 36; ++n) {
      CHECK(scenario_table(r.s, n) == doctest::Approx(static_cast<double>(n + 1) * r.per_update));
      CHECK(scenario_table(r.s, n, 20.0, MajorityRule::kRaft) ==
            doctest::Approx(static_cast<double>(n + 1) * r.per_update_raft));
    }
  }
  CHECK(scenario_table(Scenario::kTT, 3) == doctest::Approx(86.0));
  CHECK(scenario_table(Scenario::kTMC, 3) == doctest::Approx(114.0));
  CHECK(scenario_table(Scenario::kTMC, 36) == doctest::Approx(1054.5));
  CHECK(scenario_table(Scenario::kTPC, 36) == doctest::Approx(10526.5));
  CHECK(scenario_table(Scenario::kTPF, 36) == doctest::Approx(5661.0));
  CHECK(scenario_table(Scenario::kTT, 3, 0.0) == doctest::Approx(4 * 1.5));

  CHECK_THROWS_AS(build_scenario(Scenario::kTT, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(Scenario::kTT, 37), std::invalid_argument);
  CHECK(parse_scenario("TPF") == Scenario::kTPF);
  CHECK_THROWS_AS(parse_scenario("TXX"), std::invalid_argument);

  const ScenarioSetup s = build_scenario(Scenario::kTMC, 5);
  CHECK(s.network.node_count() == 5);
  CHECK(s.delays.size() == 8);
  CHECK(s.flow.path.size() == 6);
  CHECK(s.view.leader_node() == 6);
  for (NodeId sw = 0; sw < 5; ++sw) CHECK(s.view.master_node(sw) == 5);
}
