#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctrplace/topology.hpp"

namespace ctrplace {

/// Index of a controller inside a Placement (0..C-1), as opposed to the
/// NodeId of the switch that hosts it.
using ControllerIndex = int;

// Ordered list of C distinct hosting switches.
class Placement {
 public:
  Placement() = default;
  // Throws std::invalid_argument unless 1 <= C <= node_count, entries are
  // distinct and each lies in [0, node_count).
  Placement(std::vector<NodeId> controllers, std::size_t node_count);

  std::size_t size() const { return controllers_.size(); }
  NodeId operator[](ControllerIndex c) const {
    return controllers_[static_cast<std::size_t>(c)];
  }
  const std::vector<NodeId>& nodes() const { return controllers_; }

  // Index of the controller hosted at `node`, or -1.
  ControllerIndex controller_at(NodeId node) const;

  // "1;5;7"
  std::string to_string() const;

  friend bool operator==(const Placement&, const Placement&) = default;

 private:
  std::vector<NodeId> controllers_;
};

struct MasterAssignment {
  std::vector<ControllerIndex> master_of;  // switch -> controller index
};

/// Each switch gets its nearest controller; ties go to the lowest index,
/// except that a controller always masters its own hosting switch.
MasterAssignment assign_masters(const DelayMatrix& d, const Placement& p);

/// Mean over all switches of the delay to their master.
double avg_sw_ctr_delay(const DelayMatrix& d, const Placement& p);

/// Mean delay over unordered controller pairs; 0 for a single controller.
double avg_ctr_ctr_delay(const DelayMatrix& d, const Placement& p);

/// Exact binomial coefficient N choose C. Throws std::invalid_argument when
/// C is outside [1, N] and std::overflow_error past 2^64 - 1.
std::uint64_t placement_count(std::size_t n, std::size_t c);

struct DelayPoint {
  double sw_ctr = 0.0;
  double ctr_ctr = 0.0;
  Placement placement;
};

DelayPoint evaluate_placement(const DelayMatrix& d, const Placement& p);

/// `placement,sw_ctr_ms,ctr_ctr_ms` with placement ids joined by ';'.
std::string to_csv_row(const DelayPoint& pt);
inline constexpr const char* kDelayPointCsvHeader = "placement,sw_ctr_ms,ctr_ctr_ms";

/// Parses "3;7;12" (',' also accepted).
Placement parse_placement(const std::string& text, std::size_t node_count);

}  // namespace ctrplace
