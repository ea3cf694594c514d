#include "ctrplace/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ctrplace {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be > 0");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

PlacementSampler::PlacementSampler(std::size_t node_count, std::size_t controllers)
    : c_(controllers), perm_(node_count) {
  if (controllers < 1 || controllers > node_count) {
    throw std::invalid_argument("random placement requires 1 <= C <= N");
  }
  std::iota(perm_.begin(), perm_.end(), 0);
  swaps_.resize(c_);
}

Placement PlacementSampler::draw(Rng& rng) {
  const std::size_t n = perm_.size();
  for (std::size_t k = 0; k < c_; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.uniform_below(n - k));
    swaps_[k] = j;
    std::swap(perm_[k], perm_[j]);
  }
  std::vector<NodeId> chosen(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(c_));
  // Undo in reverse so the next draw starts from the identity again.
  for (std::size_t k = c_; k-- > 0;) std::swap(perm_[k], perm_[swaps_[k]]);
  return Placement(std::move(chosen), n);
}

Placement random_placement(std::size_t node_count, std::size_t controllers, Rng& rng) {
  return PlacementSampler(node_count, controllers).draw(rng);
}

bool dominates(const DelayPoint& a, const DelayPoint& b) {
  return a.sw_ctr <= b.sw_ctr && a.ctr_ctr <= b.ctr_ctr;
}

bool ParetoSet::add_prune(DelayPoint candidate) {
  for (const auto& p : points_) {
    if (dominates(p, candidate)) return false;
  }
  std::erase_if(points_, [&](const DelayPoint& p) { return dominates(candidate, p); });
  points_.push_back(std::move(candidate));
  return true;
}

std::vector<DelayPoint> ParetoSet::sorted() const {
  std::vector<DelayPoint> out = points_;
  std::sort(out.begin(), out.end(),
            [](const DelayPoint& a, const DelayPoint& b) { return a.sw_ctr < b.sw_ctr; });
  return out;
}

bool ParetoSet::is_valid() const {
  for (std::size_t a = 0; a < points_.size(); ++a) {
    for (std::size_t b = 0; b < points_.size(); ++b) {
      if (a != b && dominates(points_[a], points_[b])) return false;
    }
  }
  return true;
}

ExaPlaceResult exa_place(const DelayMatrix& d, std::size_t controllers, std::uint64_t cap,
                         const std::function<void(const DelayPoint&)>& on_point) {
  const std::size_t n = d.size();
  const std::uint64_t total = placement_count(n, controllers);
  if (total > cap) {
    throw EnumerationCapExceeded("exhaustive search over " + std::to_string(total) +
                                 " placements exceeds the cap of " + std::to_string(cap) +
                                 "; use the evolutionary search instead");
  }
  ExaPlaceResult result;
  std::vector<NodeId> combo(controllers);
  std::iota(combo.begin(), combo.end(), 0);
  const auto c = static_cast<std::ptrdiff_t>(controllers);
  while (true) {
    DelayPoint pt = evaluate_placement(d, Placement(combo, n));
    ++result.evaluated;
    if (on_point) on_point(pt);
    result.frontier.add_prune(std::move(pt));

    // Next combination in lexicographic order.
    std::ptrdiff_t k = c - 1;
    while (k >= 0 && combo[static_cast<std::size_t>(k)] ==
                         static_cast<NodeId>(n - controllers + static_cast<std::size_t>(k))) {
      --k;
    }
    if (k < 0) break;
    ++combo[static_cast<std::size_t>(k)];
    for (std::ptrdiff_t j = k + 1; j < c; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return result;
}

ParetoSet rnd_place(const DelayMatrix& d, std::size_t controllers, const SearchBudget& budget) {
  if (budget.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  PlacementSampler sampler(d.size(), controllers);
  Rng rng(budget.seed);
  ParetoSet set;
  for (std::size_t i = 0; i < budget.iterations; ++i) {
    set.add_prune(evaluate_placement(d, sampler.draw(rng)));
  }
  return set;
}

Placement decrease_ctr_ctr_delay(const Placement& p, const DelayMatrix& d, const Topology& t) {
  const auto c = static_cast<ControllerIndex>(p.size());
  if (c < 2) throw std::invalid_argument("perturbation needs at least two controllers");

  ControllerIndex farthest = 0;
  double farthest_total = -1.0;
  for (ControllerIndex a = 0; a < c; ++a) {
    double total = 0.0;
    for (ControllerIndex b = 0; b < c; ++b) {
      if (b != a) total += d(p[a], p[b]);
    }
    if (total > farthest_total) {
      farthest_total = total;
      farthest = a;
    }
  }
  ControllerIndex nearest = -1;
  for (ControllerIndex b = 0; b < c; ++b) {
    if (b == farthest) continue;
    if (nearest < 0 || d(p[b], p[farthest]) < d(p[nearest], p[farthest])) nearest = b;
  }

  const auto route = shortest_path_nodes(t, d, p[farthest], p[nearest]);
  if (route.size() < 2) return p;
  const NodeId hop = route[1];
  if (p.controller_at(hop) >= 0) return p;  // next hop already hosts a controller

  std::vector<NodeId> moved = p.nodes();
  moved[static_cast<std::size_t>(farthest)] = hop;
  return Placement(std::move(moved), d.size());
}

ParetoSet evo_place(const DelayMatrix& d, std::size_t controllers, const SearchBudget& budget,
                    const Topology& t) {
  if (budget.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (t.node_count() != d.size()) {
    throw std::invalid_argument("topology and delay matrix sizes differ");
  }
  PlacementSampler sampler(d.size(), controllers);
  Rng rng(budget.seed);
  ParetoSet set;
  for (std::size_t i = 0; i < budget.iterations; ++i) {
    Placement p = sampler.draw(rng);
    bool accepted = set.add_prune(evaluate_placement(d, p));
    while (accepted && controllers >= 2) {
      Placement next = decrease_ctr_ctr_delay(p, d, t);
      if (next == p) break;
      accepted = set.add_prune(evaluate_placement(d, next));
      p = std::move(next);
    }
  }
  return set;
}

FrontierErrors frontier_errors(const ParetoSet& optimal, const ParetoSet& approx) {
  if (optimal.empty() || approx.empty()) {
    throw std::invalid_argument("frontier_errors needs two non-empty sets");
  }
  // Ascending sw_ctr, descending ctr_ctr.
  const auto stairs = optimal.sorted();

  // Smallest optimal sw_ctr among points with ctr_ctr <= cc; the largest
  // sw_ctr step when cc lies below the frontier.
  auto sw_at = [&](double cc) {
    for (const auto& s : stairs) {
      if (s.ctr_ctr <= cc) return s.sw_ctr;
    }
    return stairs.back().sw_ctr;
  };
  // Smallest optimal ctr_ctr among points with sw_ctr <= sw.
  auto cc_at = [&](double sw) {
    double best = stairs.front().ctr_ctr;
    for (const auto& s : stairs) {
      if (s.sw_ctr > sw) break;
      best = s.ctr_ctr;
    }
    return best;
  };

  FrontierErrors e;
  for (const auto& a : approx.points()) {
    e.sw_err += std::max(0.0, a.sw_ctr - sw_at(a.ctr_ctr));
    e.cc_err += std::max(0.0, a.ctr_ctr - cc_at(a.sw_ctr));
  }
  e.sw_err /= static_cast<double>(approx.size());
  e.cc_err /= static_cast<double>(approx.size());
  return e;
}

namespace {

// num / den with 0/0 = 1 and x/0 = +inf.
double safe_ratio(double num, double den, bool& finite) {
  if (den == 0.0) {
    if (num == 0.0) return 1.0;
    finite = false;
    return std::numeric_limits<double>::infinity();
  }
  return num / den;
}

}  // namespace

ExtremeGains extreme_gains(const ParetoSet& frontier) {
  if (frontier.empty()) throw std::invalid_argument("extreme_gains needs a non-empty frontier");
  const auto& pts = frontier.points();
  const auto& p1 = *std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.sw_ctr < b.sw_ctr;
  });
  const auto& p2 = *std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.ctr_ctr < b.ctr_ctr;
  });
  ExtremeGains g;
  g.sw_ratio = safe_ratio(p2.sw_ctr, p1.sw_ctr, g.finite);
  g.cc_ratio = safe_ratio(p1.ctr_ctr, p2.ctr_ctr, g.finite);
  return g;
}

double ctr_ctr_reduction_factor(const ParetoSet& frontier) {
  if (frontier.empty()) {
    throw std::invalid_argument("ctr_ctr_reduction_factor needs a non-empty frontier");
  }
  const auto& pts = frontier.points();
  const auto& best_sw = *std::min_element(
      pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.sw_ctr < b.sw_ctr; });
  double best_cc = best_sw.ctr_ctr;
  for (const auto& p : pts) {
    if (p.sw_ctr <= 2.0 * best_sw.sw_ctr) best_cc = std::min(best_cc, p.ctr_ctr);
  }
  bool finite = true;
  return safe_ratio(best_sw.ctr_ctr, best_cc, finite);
}

}  // namespace ctrplace
