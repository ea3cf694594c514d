#include "ctrplace/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <utility>

namespace ctrplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_connected(const std::vector<std::vector<Neighbor>>& adj) {
  if (adj.empty()) return false;
  std::vector<bool> seen(adj.size(), false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (const auto& nb : adj[u]) {
      auto v = static_cast<std::size_t>(nb.node);
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == adj.size();
}

}  // namespace

Topology::Topology(std::string name, std::vector<Node> nodes, std::vector<Edge> edges)
    : name_(std::move(name)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw TopologyError("topology has no nodes");
  const auto n = static_cast<NodeId>(nodes_.size());
  for (NodeId k = 0; k < n; ++k) {
    const auto& nd = nodes_[static_cast<std::size_t>(k)];
    if (nd.id != k) {
      throw TopologyError("node ids must be dense 0..N-1; found id " +
                          std::to_string(nd.id) + " at position " + std::to_string(k));
    }
    if (nd.coord) {
      const auto& c = *nd.coord;
      if (!(c.latitude >= -90.0 && c.latitude <= 90.0) ||
          !(c.longitude >= -180.0 && c.longitude <= 180.0)) {
        throw TopologyError("node " + std::to_string(k) + " has out-of-range coordinates");
      }
    }
  }

  std::map<std::pair<NodeId, NodeId>, double> unique;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw TopologyError("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                          std::to_string(e.v) + ")");
    }
    if (e.u == e.v) throw TopologyError("self-loop at node " + std::to_string(e.u));
    if (!std::isfinite(e.latency_ms) || e.latency_ms < 0.0) {
      throw TopologyError("edge latency must be finite and non-negative");
    }
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = unique.try_emplace(key, e.latency_ms);
    if (!inserted) it->second = std::min(it->second, e.latency_ms);
  }

  adjacency_.assign(nodes_.size(), {});
  edges_.reserve(unique.size());
  for (const auto& [key, lat] : unique) {
    edges_.push_back({key.first, key.second, lat});
    adjacency_[static_cast<std::size_t>(key.first)].push_back({key.second, lat});
    adjacency_[static_cast<std::size_t>(key.second)].push_back({key.first, lat});
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  if (!is_connected(adjacency_)) {
    throw TopologyError("topology '" + name_ + "' is not connected");
  }
}

std::optional<double> Topology::edge_latency(NodeId a, NodeId b) const {
  for (const auto& nb : neighbors(a)) {
    if (nb.node == b) return nb.latency_ms;
  }
  return std::nullopt;
}

DelayMatrix DelayMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw std::invalid_argument("delay matrix must be non-empty");
  DelayMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("delay matrix must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("delay matrix entries must be finite and non-negative");
      }
      m.at(i, j) = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (m.at(i, i) != 0.0) throw std::invalid_argument("delay matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m.at(i, j) != m.at(j, i)) throw std::invalid_argument("delay matrix must be symmetric");
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double direct = m.at(i, j);
        const double via = m.at(i, k) + m.at(k, j);
        if (direct > via + 1e-9 * std::max(1.0, direct)) {
          throw std::invalid_argument("delay matrix violates the triangle inequality");
        }
      }
    }
  }
  return m;
}

DelayMatrix DelayMatrix::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale factor must be positive");
  }
  DelayMatrix m(*this);
  for (auto& v : m.d_) v *= factor;
  return m;
}

double haversine_km(const GeoCoord& a, const GeoCoord& b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double lat1 = a.latitude * kDeg;
  const double lat2 = b.latitude * kDeg;
  const double dlat = lat2 - lat1;
  const double dlon = (b.longitude - a.longitude) * kDeg;
  const double s = std::sin(dlat / 2);
  const double t = std::sin(dlon / 2);
  const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

double geo_latency(const Node& a, const Node& b, double speed_km_per_ms) {
  if (!(speed_km_per_ms > 0.0)) throw std::invalid_argument("propagation speed must be > 0");
  if (!a.coord || !b.coord) {
    throw TopologyError("geo_latency: node " + std::to_string(!a.coord ? a.id : b.id) +
                        " has no coordinates");
  }
  return haversine_km(*a.coord, *b.coord) / speed_km_per_ms;
}

DelayMatrix all_pairs_delays(const Topology& t) {
  const std::size_t n = t.node_count();
  DelayMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = (i == j) ? 0.0 : kInf;
  }
  for (const auto& e : t.edges()) {
    auto u = static_cast<std::size_t>(e.u);
    auto v = static_cast<std::size_t>(e.v);
    m.at(u, v) = std::min(m.at(u, v), e.latency_ms);
    m.at(v, u) = m.at(u, v);
  }
  // Floyd-Warshall, repeated until nothing moves so the closure holds exactly
  // in floating point. Only i < j is relaxed and mirrored, keeping symmetry.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dik = m.at(i, k);
        if (dik == kInf) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          const double cand = dik + m.at(k, j);
          if (cand < m.at(i, j)) {
            m.at(i, j) = cand;
            m.at(j, i) = cand;
            changed = true;
          }
        }
      }
    }
  }
  for (double v : m.d_) {
    if (v == kInf) throw TopologyError("topology is disconnected");
  }
  return m;
}

Topology linear_topology(std::size_t n, double hop_delay_ms) {
  if (n == 0) throw std::invalid_argument("linear topology needs at least one node");
  if (!(hop_delay_ms > 0.0)) throw std::invalid_argument("hop delay must be > 0");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  nodes.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    nodes.push_back({static_cast<NodeId>(k), "s" + std::to_string(k), std::nullopt});
    if (k > 0) edges.push_back({static_cast<NodeId>(k - 1), static_cast<NodeId>(k), hop_delay_ms});
  }
  return Topology("linear" + std::to_string(n), std::move(nodes), std::move(edges));
}

std::vector<NodeId> shortest_path_nodes(const Topology& t, const DelayMatrix& d, NodeId i,
                                        NodeId j) {
  const auto n = static_cast<NodeId>(t.node_count());
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("node id out of range");
  if (d.size() < t.node_count()) throw std::invalid_argument("delay matrix smaller than topology");
  if (i == j) return {i};

  auto tight = [&](NodeId u, const Neighbor& nb) {
    const double rest = d(u, j);
    return std::abs(nb.latency_ms + d(nb.node, j) - rest) <= 1e-9 * std::max(1.0, rest);
  };

  // Fewest hops to j using only shortest-path edges; orders zero-latency
  // stretches where the delay alone cannot make progress.
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> hops(static_cast<std::size_t>(n), kUnreached);
  hops[static_cast<std::size_t>(j)] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId u = 0; u < n; ++u) {
      for (const auto& nb : t.neighbors(u)) {
        const int hv = hops[static_cast<std::size_t>(nb.node)];
        if (hv != kUnreached && tight(u, nb) && hv + 1 < hops[static_cast<std::size_t>(u)]) {
          hops[static_cast<std::size_t>(u)] = hv + 1;
          changed = true;
        }
      }
    }
  }
  if (hops[static_cast<std::size_t>(i)] == kUnreached) {
    throw TopologyError("node " + std::to_string(j) + " unreachable from " + std::to_string(i));
  }

  std::vector<NodeId> path{i};
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  visited[static_cast<std::size_t>(i)] = true;
  NodeId u = i;
  while (u != j) {
    NodeId next = -1;
    for (const auto& nb : t.neighbors(u)) {
      const auto hv = hops[static_cast<std::size_t>(nb.node)];
      if (hv == kUnreached || !tight(u, nb)) continue;
      if (d(nb.node, j) < d(u, j) || hv < hops[static_cast<std::size_t>(u)]) {
        next = nb.node;
        break;
      }
    }
    if (next < 0 || visited[static_cast<std::size_t>(next)]) {
      throw std::logic_error("shortest path reconstruction failed");
    }
    visited[static_cast<std::size_t>(next)] = true;
    path.push_back(next);
    u = next;
  }
  return path;
}

std::vector<NodeId> shortest_path_nodes(const Topology& t, NodeId i, NodeId j) {
  return shortest_path_nodes(t, all_pairs_delays(t), i, j);
}

}  // namespace ctrplace
