#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ctrplace/placement.hpp"
#include "ctrplace/topology.hpp"

namespace ctrplace {

/// Seeded generator for the placement searches: std::mt19937_64 plus an
/// unbiased bounded draw, so output depends only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound). bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Partial Fisher-Yates over a persistent identity permutation; each draw
/// costs O(C) after the O(N) setup.
class PlacementSampler {
 public:
  PlacementSampler(std::size_t node_count, std::size_t controllers);
  Placement draw(Rng& rng);

 private:
  std::size_t c_;
  std::vector<NodeId> perm_;
  std::vector<std::size_t> swaps_;
};

/// First C entries of a uniformly random permutation of 0..N-1.
Placement random_placement(std::size_t node_count, std::size_t controllers, Rng& rng);

/// Weak dominance: a is no worse than b on both delays. Identical delay
/// pairs dominate each other, so duplicates never enter a ParetoSet.
bool dominates(const DelayPoint& a, const DelayPoint& b);

// Mutually non-dominated delay points.
class ParetoSet {
 public:
  /// Rejects `candidate` if any member dominates it; otherwise evicts the
  /// members it dominates and inserts it. Returns whether it was inserted.
  bool add_prune(DelayPoint candidate);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<DelayPoint>& points() const { return points_; }

  /// Ascending sw_ctr (hence strictly descending ctr_ctr).
  std::vector<DelayPoint> sorted() const;

  /// Pairwise scan of the non-domination invariant.
  bool is_valid() const;

 private:
  std::vector<DelayPoint> points_;
};

struct SearchBudget {
  std::size_t iterations = 1;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 5'000'000;

class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExaPlaceResult {
  ParetoSet frontier;
  std::uint64_t evaluated = 0;
};

/// Exhaustive search over all C-subsets in lexicographic order. `on_point`
/// sees every evaluated placement. Throws EnumerationCapExceeded when N
/// choose C exceeds `cap`.
ExaPlaceResult exa_place(const DelayMatrix& d, std::size_t controllers,
                         std::uint64_t cap = kDefaultEnumerationCap,
                         const std::function<void(const DelayPoint&)>& on_point = {});

/// Random sampling of `budget.iterations` placements.
ParetoSet rnd_place(const DelayMatrix& d, std::size_t controllers, const SearchBudget& budget);

/// Moves the controller with the largest total delay to the others one hop
/// towards its nearest peer. Returns `p` unchanged when that hop lands on
/// another controller. Requires C >= 2.
Placement decrease_ctr_ctr_delay(const Placement& p, const DelayMatrix& d, const Topology& t);

/// Random sampling where every accepted placement is repeatedly perturbed
/// with decrease_ctr_ctr_delay while the perturbed placement keeps being
/// accepted.
ParetoSet evo_place(const DelayMatrix& d, std::size_t controllers, const SearchBudget& budget,
                    const Topology& t);

struct FrontierErrors {
  double sw_err = 0.0;
  double cc_err = 0.0;
};

/// Mean excess of the approximate points over the staircase envelope of the
/// optimal frontier, measured along each axis.
FrontierErrors frontier_errors(const ParetoSet& optimal, const ParetoSet& approx);

struct ExtremeGains {
  double sw_ratio = 1.0;  // sw_ctr(P2) / sw_ctr(P1)
  double cc_ratio = 1.0;  // ctr_ctr(P1) / ctr_ctr(P2)
  bool finite = true;     // false when a divisor was zero (ratio is +inf)
};

/// P1 = min Sw-Ctr point, P2 = min Ctr-Ctr point.
ExtremeGains extreme_gains(const ParetoSet& frontier);

/// Ctr-Ctr gain when the Sw-Ctr delay may at most double; +inf when the
/// best eligible point has zero Ctr-Ctr delay and P' does not.
double ctr_ctr_reduction_factor(const ParetoSet& frontier);

}  // namespace ctrplace
