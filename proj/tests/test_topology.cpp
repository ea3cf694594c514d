#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ctrplace/topology.hpp"

using namespace ctrplace;

namespace {

Node bare(NodeId id) { return {id, "n" + std::to_string(id), std::nullopt}; }

std::vector<Node> bare_nodes(int n) {
  std::vector<Node> v;
  for (int i = 0; i < n; ++i) v.push_back(bare(i));
  return v;
}

Topology triangle() {
  return Topology("tri", bare_nodes(3), {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}});
}

// Great-circle distance through the chord length of the two unit vectors.
double chord_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = M_PI / 180.0;
  auto vec = [&](double la, double lo) {
    return std::array<double, 3>{std::cos(la * r) * std::cos(lo * r),
                                 std::cos(la * r) * std::sin(lo * r), std::sin(la * r)};
  };
  const auto a = vec(lat1, lon1);
  const auto b = vec(lat2, lon2);
  const double c = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                             (a[2] - b[2]) * (a[2] - b[2]));
  return 2.0 * 6371.0 * std::asin(c / 2.0);
}

// Minimum over every simple path, by DFS.
double brute_shortest(const Topology& t, NodeId s, NodeId g) {
  std::vector<bool> seen(t.node_count(), false);
  double best = INFINITY;
  std::function<void(NodeId, double)> go = [&](NodeId v, double acc) {
    if (v == g) {
      best = std::min(best, acc);
      return;
    }
    seen[static_cast<std::size_t>(v)] = true;
    for (const auto& nb : t.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(nb.node)]) go(nb.node, acc + nb.latency_ms);
    }
    seen[static_cast<std::size_t>(v)] = false;
  };
  go(s, 0.0);
  return best;
}

Topology random_connected(std::mt19937& rng, int n, int extra, bool integral) {
  std::uniform_real_distribution<double> w(0.1, 10.0);
  std::uniform_int_distribution<int> wi(0, 6);
  std::vector<Edge> edges;
  auto lat = [&] { return integral ? static_cast<double>(wi(rng)) : w(rng); };
  for (int v = 1; v < n; ++v) {
    edges.push_back({std::uniform_int_distribution<int>(0, v - 1)(rng), v, lat()});
  }
  for (int k = 0; k < extra && n > 1; ++k) {
    const int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (a != b) edges.push_back({a, b, lat()});
  }
  return Topology("rand", bare_nodes(n), edges);
}

double path_sum(const Topology& t, const std::vector<NodeId>& path) {
  double s = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) s += *t.edge_latency(path[k - 1], path[k]);
  return s;
}

const char* kGraphml = R"(<?xml version="1.0" encoding="utf-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key attr.name="Latitude" attr.type="double" for="node" id="d29" />
  <key attr.name="Longitude" attr.type="double" for="node" id="d32" />
  <key attr.name="label" attr.type="string" for="node" id="d33" />
  <key attr.name="Network" attr.type="string" for="graph" id="d4" />
  <key attr.name="LinkSpeed" attr.type="string" for="edge" id="d36" />
  <key attr.name="latency_ms" attr.type="string" for="edge" id="d40" />
  <graph edgedefault="undirected">
    <data key="d4">Tiny</data>
    <node id="0"><data key="d29">45.0703</data><data key="d32">7.6869</data><data key="d33">Turin</data></node>
    <node id="1"><data key="d29">45.4642</data><data key="d32">9.19</data><data key="d33">Milan</data></node>
    <node id="2"><data key="d29">43.7228</data><data key="d32">10.4017</data><data key="d33">Pisa</data></node>
    <edge source="0" target="1"><data key="d36">10</data></edge>
    <edge source="1" target="2"><data key="d40">3.5</data></edge>
    <edge source="1" target="2"><data key="d40">4.5</data></edge>
    <edge source="2" target="2" />
  </graph>
</graphml>
)";

}  // namespace

TEST_CASE("haversine matches an independent chord computation") {
  const GeoCoord turin{45.0703, 7.6869};
  const GeoCoord milan{45.4642, 9.19};
  const double km = haversine_km(turin, milan);
  CHECK(km == doctest::Approx(chord_km(45.0703, 7.6869, 45.4642, 9.19)).epsilon(1e-12));
  CHECK(km == doctest::Approx(125.6).epsilon(0.01));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> la(-90, 90), lo(-180, 180);
  for (int k = 0; k < 200; ++k) {
    const double a = la(rng), b = lo(rng), c = la(rng), e = lo(rng);
    CHECK(haversine_km({a, b}, {c, e}) == doctest::Approx(chord_km(a, b, c, e)).epsilon(1e-9));
  }
}

TEST_CASE("geo_latency is symmetric and inverse in speed") {
  const Node a{0, "a", GeoCoord{45.0703, 7.6869}};
  const Node b{1, "b", GeoCoord{45.4642, 9.19}};
  CHECK(geo_latency(a, b) == geo_latency(b, a));
  CHECK(geo_latency(a, b) == doctest::Approx(0.628).epsilon(0.01));
  CHECK(geo_latency(a, b, 400.0) == doctest::Approx(geo_latency(a, b, 200.0) / 2.0));
  // 200 km along a meridian at the default speed.
  const double deg = 200.0 / 6371.0 * 180.0 / M_PI;
  const Node c{2, "c", GeoCoord{0.0, 0.0}};
  const Node e{3, "e", GeoCoord{deg, 0.0}};
  CHECK(geo_latency(c, e) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(geo_latency(a, bare(9)), TopologyError);
}

TEST_CASE("all_pairs_delays on small graphs") {
  const Topology lin = linear_topology(8, 1.0);
  CHECK(all_pairs_delays(lin)(0, 7) == 7.0);

  const DelayMatrix d = all_pairs_delays(triangle());
  CHECK(d(0, 2) == 2.0);
  CHECK(d(2, 0) == 2.0);

  const DelayMatrix one = all_pairs_delays(linear_topology(1, 1.0));
  CHECK(one.size() == 1);
  CHECK(one(0, 0) == 0.0);
}

TEST_CASE("all_pairs_delays equals brute-force path enumeration") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 9)(rng);
    const bool integral = trial % 2 == 0;  // integral weights produce ties
    const Topology t = random_connected(rng, n, n, integral);
    const DelayMatrix d = all_pairs_delays(t);
    for (int i = 0; i < n; ++i) {
      CHECK(d(i, i) == 0.0);
      for (int j = 0; j < n; ++j) {
        CHECK(d(i, j) == d(j, i));
        CHECK(d(i, j) == doctest::Approx(brute_shortest(t, i, j)).epsilon(1e-12));
        for (int k = 0; k < n; ++k) CHECK(d(i, j) <= d(i, k) + d(k, j));
      }
    }
  }
}

TEST_CASE("all_pairs_delays on trees equals the unique path sum") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const Topology t = random_connected(rng, n, 0, false);
    const DelayMatrix d = all_pairs_delays(t);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(d(i, j) == doctest::Approx(brute_shortest(t, i, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shortest_path_nodes") {
  const Topology lin = linear_topology(8, 1.0);
  CHECK(shortest_path_nodes(lin, 0, 4) == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(shortest_path_nodes(lin, 5, 5) == std::vector<NodeId>{5});
  CHECK(shortest_path_nodes(triangle(), 0, 2) == std::vector<NodeId>{0, 1, 2});

  // Square 0-1-3, 0-2-3 with equal costs: next hop 1 wins.
  const Topology sq("sq", bare_nodes(4), {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}});
  CHECK(shortest_path_nodes(sq, 0, 3) == std::vector<NodeId>{0, 1, 3});
  CHECK(shortest_path_nodes(sq, 3, 0) == std::vector<NodeId>{3, 1, 0});

  // Zero-latency edges must not loop.
  const Topology z("z", bare_nodes(4), {{0, 1, 0.0}, {1, 2, 0.0}, {2, 3, 0.0}, {0, 3, 0.0}});
  const auto zp = shortest_path_nodes(z, 1, 3);
  CHECK(zp.front() == 1);
  CHECK(zp.back() == 3);
  CHECK(zp.size() == 3);
}

TEST_CASE("shortest_path_nodes realizes the delay and is loop-free") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const Topology t = random_connected(rng, n, n, trial % 2 == 0);
    const DelayMatrix d = all_pairs_delays(t);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto p = shortest_path_nodes(t, d, i, j);
        REQUIRE(p.front() == i);
        REQUIRE(p.back() == j);
        CHECK(std::abs(path_sum(t, p) - d(i, j)) <= 1e-9);
        std::vector<NodeId> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
      }
    }
  }
}

TEST_CASE("linear_topology") {
  const Topology t = linear_topology(8, 1.0);
  CHECK(t.node_count() == 8);
  CHECK(t.edges().size() == 7);
  const Topology one = linear_topology(1, 1.0);
  CHECK(one.node_count() == 1);
  CHECK(one.edges().empty());
  CHECK_THROWS_AS(linear_topology(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(linear_topology(36, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(linear_topology(36, -1.0), std::invalid_argument);
}

TEST_CASE("Topology construction checks") {
  CHECK_THROWS_AS(Topology("x", bare_nodes(3), {{0, 1, 1.0}}), TopologyError);  // disconnected
  CHECK_THROWS_AS(Topology("x", bare_nodes(2), {{0, 0, 1.0}, {0, 1, 1.0}}), TopologyError);
  CHECK_THROWS_AS(Topology("x", bare_nodes(2), {{0, 5, 1.0}}), TopologyError);
  CHECK_THROWS_AS(Topology("x", bare_nodes(2), {{0, 1, -1.0}}), TopologyError);
  CHECK_THROWS_AS(Topology("x", bare_nodes(2), {{0, 1, NAN}}), TopologyError);
  CHECK_THROWS_AS(Topology("x", {}, {}), TopologyError);

  const Topology par("p", bare_nodes(2), {{0, 1, 3.0}, {1, 0, 2.0}});
  CHECK(par.edges().size() == 1);
  CHECK(*par.edge_latency(0, 1) == 2.0);
  CHECK_FALSE(linear_topology(3, 1.0).edge_latency(0, 2).has_value());
}

TEST_CASE("DelayMatrix::from_rows validation") {
  CHECK_NOTHROW(DelayMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(DelayMatrix::from_rows({{0, 1}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(DelayMatrix::from_rows({{1, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(DelayMatrix::from_rows({{0, -1}, {-1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(DelayMatrix::from_rows({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DelayMatrix::from_rows({{0, 1}}), std::invalid_argument);
  const DelayMatrix d = DelayMatrix::from_rows({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}).scaled(3.0);
  CHECK(d(0, 2) == 6.0);
}

TEST_CASE("GraphML loading") {
  std::istringstream in(kGraphml);
  const Topology t = load_graphml(in);
  CHECK(t.name() == "Tiny");
  REQUIRE(t.node_count() == 3);
  CHECK(t.node(2).label == "Pisa");
  CHECK(t.edges().size() == 2);  // self-loop dropped, parallel edges collapsed
  CHECK(*t.edge_latency(1, 2) == 3.5);
  CHECK(*t.edge_latency(0, 1) == doctest::Approx(0.628).epsilon(0.01));

  std::istringstream bad("<graphml><graph>");
  CHECK_THROWS_AS(load_graphml(bad), TopologyError);

  std::string nocoord = kGraphml;
  nocoord.replace(nocoord.find("<data key=\"d29\">45.0703</data>"),
                  std::string("<data key=\"d29\">45.0703</data>").size(), "");
  std::istringstream nc(nocoord);
  CHECK_THROWS_AS(load_graphml(nc), TopologyError);
}

TEST_CASE("JSON topology loading") {
  std::istringstream in(R"({"name": "J", "nodes": [
      {"id": 0, "label": "a"}, {"id": 1, "label": "b"}, {"id": 2, "label": "c"}],
    "edges": [{"source": 0, "target": 1, "latency_ms": 1.0},
              {"source": 1, "target": 2, "latency_ms": 2.0}]})");
  const Topology t = load_json_topology(in);
  CHECK(t.name() == "J");
  CHECK(all_pairs_delays(t)(0, 2) == 3.0);

  std::istringstream bad(R"({"name": "J", "nodes": [{"id": 0}, {"id": 1}], "edges": []})");
  CHECK_THROWS_AS(load_json_topology(bad), TopologyError);
}

TEST_CASE("bundled Topology Zoo files") {
  const std::string dir = CTRPLACE_DATA_DIR "/topologies/";
  struct Expect {
    const char* file;
    std::size_t nodes;
  };
  for (const auto& e : {Expect{"Abilene.graphml", 11}, Expect{"Highwinds.graphml", 18},
                        Expect{"York.graphml", 23}, Expect{"Garr201201.graphml", 48}}) {
    CAPTURE(e.file);
    const Topology t = load_topology(dir + e.file);
    CHECK(t.node_count() == e.nodes);
    const DelayMatrix d = all_pairs_delays(t);
    const auto n = static_cast<NodeId>(d.size());
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        CHECK(d(i, j) == d(j, i));
        for (NodeId k = 0; k < n; ++k) CHECK(d(i, j) <= d(i, k) + d(k, j));
      }
    }
  }
  CHECK_THROWS(load_topology(dir + "missing.graphml"));
}
