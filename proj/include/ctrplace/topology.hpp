#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrplace {

/// Node index in a topology. Ids are dense: 0..N-1.
using NodeId = int;

inline constexpr double kDefaultSpeedKmPerMs = 200.0;
inline constexpr double kEarthRadiusKm = 6371.0;

/// Malformed or unusable topology data (parse failures, disconnected graphs,
/// missing coordinates).
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeoCoord {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]
};

struct Node {
  NodeId id = 0;
  std::string label;
  std::optional<GeoCoord> coord;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double latency_ms = 0.0;
};

struct Neighbor {
  NodeId node = 0;
  double latency_ms = 0.0;
};

// Connected, undirected, loop-free switch graph. Immutable once built.
class Topology {
 public:
  // Validates ids, latencies and connectivity. Parallel edges collapse to the
  // smallest latency. Throws TopologyError on violations.
  Topology(std::string name, std::vector<Node> nodes, std::vector<Edge> edges);

  const std::string& name() const { return name_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  // One entry per unordered pair, u < v, sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  // Sorted by neighbor id.
  std::span<const Neighbor> neighbors(NodeId id) const {
    return adjacency_.at(static_cast<std::size_t>(id));
  }

  // Latency of the direct edge, if any.
  std::optional<double> edge_latency(NodeId a, NodeId b) const;

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// All-pairs one-way delays in ms. Symmetric with a zero diagonal and closed
/// under the triangle inequality.
class DelayMatrix {
 public:
  DelayMatrix() = default;

  // Checks shape, finiteness, non-negativity, zero diagonal, exact symmetry
  // and the triangle inequality (up to 1e-9 relative slack).
  static DelayMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double operator()(NodeId i, NodeId j) const {
    return d_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  std::span<const double> row(NodeId i) const {
    return {d_.data() + static_cast<std::size_t>(i) * n_, n_};
  }

  DelayMatrix scaled(double factor) const;

 private:
  friend DelayMatrix all_pairs_delays(const Topology& t);
  explicit DelayMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

  std::size_t n_ = 0;
  std::vector<double> d_;
};

double haversine_km(const GeoCoord& a, const GeoCoord& b);

/// Propagation delay between two geolocated nodes at `speed_km_per_ms`.
/// Throws TopologyError if either node lacks coordinates.
double geo_latency(const Node& a, const Node& b,
                   double speed_km_per_ms = kDefaultSpeedKmPerMs);

DelayMatrix all_pairs_delays(const Topology& t);

/// Chain 0 - 1 - ... - (n-1) without coordinates.
Topology linear_topology(std::size_t n, double hop_delay_ms);

/// Node sequence realizing d(i, j). Among next hops that lie on a shortest
/// path the smallest id wins.
std::vector<NodeId> shortest_path_nodes(const Topology& t, const DelayMatrix& d,
                                        NodeId i, NodeId j);
std::vector<NodeId> shortest_path_nodes(const Topology& t, NodeId i, NodeId j);

struct LoadOptions {
  double speed_km_per_ms = kDefaultSpeedKmPerMs;
};

/// Internet Topology Zoo GraphML. Honors an optional `latency_ms` edge key;
/// otherwise edge latency comes from node Latitude/Longitude.
Topology load_graphml(std::istream& in, const LoadOptions& opts = {},
                      std::string fallback_name = {});

/// JSON mirror of Topology:
/// {"name", "nodes": [{"id","label","latitude","longitude"}],
///  "edges": [{"source","target","latency_ms"?}]}
Topology load_json_topology(std::istream& in, const LoadOptions& opts = {});

/// Dispatches on extension (.json vs anything else as GraphML).
Topology load_topology(const std::filesystem::path& path, const LoadOptions& opts = {});

}  // namespace ctrplace
