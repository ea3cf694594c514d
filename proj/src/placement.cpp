#include "ctrplace/placement.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace ctrplace {

namespace {

void check_fits(const DelayMatrix& d, const Placement& p) {
  if (p.size() == 0) throw std::invalid_argument("empty placement");
  for (NodeId node : p.nodes()) {
    if (static_cast<std::size_t>(node) >= d.size()) {
      throw std::invalid_argument("placement node " + std::to_string(node) +
                                  " outside delay matrix");
    }
  }
}

}  // namespace

Placement::Placement(std::vector<NodeId> controllers, std::size_t node_count)
    : controllers_(std::move(controllers)) {
  if (controllers_.empty() || controllers_.size() > node_count) {
    throw std::invalid_argument("placement needs 1 <= C <= N controllers (C=" +
                                std::to_string(controllers_.size()) +
                                ", N=" + std::to_string(node_count) + ")");
  }
  std::vector<NodeId> sorted = controllers_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("two controllers on the same switch");
  }
  if (sorted.front() < 0 || static_cast<std::size_t>(sorted.back()) >= node_count) {
    throw std::invalid_argument("placement node out of range");
  }
}

ControllerIndex Placement::controller_at(NodeId node) const {
  auto it = std::find(controllers_.begin(), controllers_.end(), node);
  return it == controllers_.end() ? -1 : static_cast<ControllerIndex>(it - controllers_.begin());
}

std::string Placement::to_string() const { return fmt::format("{}", fmt::join(controllers_, ";")); }

MasterAssignment assign_masters(const DelayMatrix& d, const Placement& p) {
  check_fits(d, p);
  MasterAssignment m;
  m.master_of.resize(d.size());
  const auto c_count = static_cast<ControllerIndex>(p.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    const auto sw = static_cast<NodeId>(s);
    ControllerIndex best = 0;
    for (ControllerIndex c = 1; c < c_count; ++c) {
      if (d(sw, p[c]) < d(sw, p[best])) best = c;
    }
    m.master_of[s] = best;
  }
  // A hosting switch stays with its own controller even when a co-located
  // peer with a lower index ties at zero delay.
  for (ControllerIndex c = 0; c < c_count; ++c) {
    m.master_of[static_cast<std::size_t>(p[c])] = c;
  }
  return m;
}

double avg_sw_ctr_delay(const DelayMatrix& d, const Placement& p) {
  check_fits(d, p);
  double total = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    const auto row = d.row(static_cast<NodeId>(s));
    double best = row[static_cast<std::size_t>(p[0])];
    for (NodeId node : p.nodes()) best = std::min(best, row[static_cast<std::size_t>(node)]);
    total += best;
  }
  return total / static_cast<double>(d.size());
}

double avg_ctr_ctr_delay(const DelayMatrix& d, const Placement& p) {
  check_fits(d, p);
  const std::size_t c = p.size();
  if (c < 2) return 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      total += d(p[static_cast<ControllerIndex>(a)], p[static_cast<ControllerIndex>(b)]);
    }
  }
  return total / static_cast<double>(c * (c - 1) / 2);
}

std::uint64_t placement_count(std::size_t n, std::size_t c) {
  if (c < 1 || c > n) {
    throw std::invalid_argument("placement_count requires 1 <= C <= N (C=" + std::to_string(c) +
                                ", N=" + std::to_string(n) + ")");
  }
  c = std::min(c, n - c);
  std::uint64_t acc = 1;
  for (std::uint64_t k = 1; k <= c; ++k) {
    // acc = binom(n - c + k - 1, k - 1); k / g divides (n - c + k) once the
    // common factor g is taken out of acc.
    const std::uint64_t g = std::gcd(acc, k);
    const std::uint64_t m = (n - c + k) / (k / g);
    if (__builtin_mul_overflow(acc / g, m, &acc)) {
      throw std::overflow_error("placement count exceeds 64 bits");
    }
  }
  return acc;
}

DelayPoint evaluate_placement(const DelayMatrix& d, const Placement& p) {
  return {avg_sw_ctr_delay(d, p), avg_ctr_ctr_delay(d, p), p};
}

std::string to_csv_row(const DelayPoint& pt) {
  return fmt::format("{},{},{}", pt.placement.to_string(), pt.sw_ctr, pt.ctr_ctr);
}

Placement parse_placement(const std::string& text, std::size_t node_count) {
  std::vector<NodeId> nodes;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw std::invalid_argument("malformed placement '" + text + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw std::invalid_argument("malformed placement '" + text + "'");
    nodes.push_back(v);
    token.clear();
  };
  for (char ch : text) {
    if (ch == ';' || ch == ',') {
      flush();
    } else if (ch != ' ') {
      token.push_back(ch);
    }
  }
  flush();
  return Placement(std::move(nodes), node_count);
}

}  // namespace ctrplace
