#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "planedyn/geometry.hpp"
#include "planedyn/invariant_sets.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"

namespace planedyn {

/// Index into {f^{-1}(W), W, f(W)}.
enum class Separator { Preimage, Leaf, Image, None };
const char* to_string(Separator s);

struct SeparationEvidence {
  Separator candidate = Separator::None;
  Point p, q;  // representative points on the other two curves
  bool separated = false;
};

struct SeparationReport {
  Separator separator = Separator::None;
  std::vector<SeparationEvidence> evidence;
  Box window;
};

/// Deviation of the pointwise f^power image of the leaf from the leaf: one
/// sided Hausdorff distance over image vertices inside the leaf's window,
/// ignoring those that project onto an end truncated inside the window.
double leaf_invariance_check(const LeafCurve& leaf, const PlaneMap& map, int power);

inline constexpr double kInvarianceTolerance = 1e-6;

/// Which of f^{-1}(W), W, f(W) separates the other two. Raises InvariantLeaf
/// when f(W) coincides with W and Inconclusive when the window cannot hold
/// all three curves.
SeparationReport separation_trichotomy(const LeafCurve& leaf, const PlaneMap& map);

struct FundamentalDomain {
  LeafCurve lower;
  Polyline upper;  // pointwise image of lower
  /// Window in which both boundary curves end on or outside the edge.
  Box window;

  Region classify(Point p) const;
};

/// Region between a leaf and its image. Requires the leaf to separate its
/// image from its preimage; raises BoundariesCross if the curves meet.
FundamentalDomain build_fundamental_domain(const LeafCurve& leaf, const PlaneMap& map);

/// Least |n| (ties toward negative n) in [-budget, budget] with f^{-n}(p) in
/// the closed domain; empty means NotCovered. Iterates outside the domain
/// window or on its edge are skipped.
std::optional<int> orbit_union_membership(const FundamentalDomain& domain, const PlaneMap& map, Point p, int budget);

struct LimitLeafOptions {
  /// +1 follows f^n(leaf), -1 follows f^{-n}(leaf).
  int direction = -1;
  /// Max iterates; must be even.
  int budget = 2048;
  int surrogate_iterations = 40;
};

struct LimitLeafResult {
  LeafCurve leaf;
  std::vector<Point> crossings;  // x_0, x_1, ... on the transversal
  Point limit;
  int iterations = 0;
};

/// Follows the crossings x_n of f^{+-n}(leaf) with the transversal, checks
/// that the even subsequence is monotone along it and returns the leaf
/// through its limit. Raises NotConverging otherwise.
LimitLeafResult boundary_limit_leaf(const LeafCurve& leaf, const LyapunovMetric& metric, const PlaneMap& map,
                                    const Polyline& transversal, const LimitLeafOptions& options = {});

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  std::size_t evaluated = 0;
  std::vector<Point> not_covered;
};

/// h(p) = (n + tau(p'), sigma(p')) with p' = f^{-n}(p) in the domain, where
/// sigma is the signed arclength (from the leaf base) of the point where the
/// opposite-stability leaf through p' meets the lower boundary and tau is
/// the U-distance ratio of p' between the lower and upper crossings.
class ConjugacyChart {
 public:
  ConjugacyChart(FundamentalDomain domain, PlaneMap map, LyapunovMetric metric, int orbit_budget = 64,
                 int surrogate_iterations = 40);

  /// Empty when p is not covered by the orbit union.
  std::optional<Point> operator()(Point p) const;
  /// Chart coordinates of a point already in the closed domain.
  Point local(Point p) const;

  const FundamentalDomain& domain() const { return domain_; }
  int orbit_budget() const { return orbit_budget_; }

 private:
  Point crossing(const Polyline& boundary, Point p) const;

  FundamentalDomain domain_;
  PlaneMap map_;
  LyapunovMetric metric_;
  int orbit_budget_;
  int surrogate_iterations_;
  Stability transverse_;
};

ConjugacyChart build_conjugacy(const FundamentalDomain& domain, const PlaneMap& map, const LyapunovMetric& metric,
                               int orbit_budget = 64);

/// Statistics of |h(f(p)) - T(h(p))| with T(x, y) = (x + 1, y); samples
/// whose images are not covered are listed and skipped.
ResidualStats conjugacy_residual(const ConjugacyChart& chart, const PlaneMap& map, const std::vector<Point>& samples);

/// No two distinct samples map within `tolerance` of each other.
bool chart_injective(const ConjugacyChart& chart, const std::vector<Point>& samples, double tolerance = 1e-9);

struct FixedPointDetection {
  bool fired = false;
  std::optional<Point> crossing;
  double displacement = 0.0;  // |f^2(p) - p| at the crossing
  std::string detail;
};

struct DetectorInputs {
  Point stable_seed;
  Polyline stable_transversal;
  Point unstable_seed;
  Polyline unstable_transversal;
  TraceOptions trace;
  int budget = 2048;
};

/// Looks for f^2-invariant stable and unstable leaves (limits in either
/// direction); fires when both exist and cross at a point moved less than
/// 1e-6 by f^2.
FixedPointDetection fixed_point_detector(const LyapunovMetric& metric, const PlaneMap& map,
                                         const DetectorInputs& inputs);

struct PipelineOptions {
  Point seed{0.0, 1.0};
  TraceOptions trace;
  /// Transversal for the limit-leaf search; defaults to the vertical segment
  /// from seed - (0, 2) to seed + (0, 2).
  std::optional<Polyline> transversal;
  int limit_budget = 2048;
  int orbit_budget = 64;
  Box coverage_box = Box::square(10.0);
  int coverage_nodes = 41;
};

struct PipelineResult {
  SeparationReport stable_separation;
  /// First coverage node the stable-leaf domain misses (empty when it covers all).
  std::vector<Point> stable_not_covered;
  bool switched = false;
  std::optional<LimitLeafResult> limit;
  double limit_invariance_1 = 0.0;
  double limit_invariance_2 = 0.0;
  std::optional<FundamentalDomain> domain;
  std::vector<Point> final_not_covered;
  std::optional<ConjugacyChart> chart;
};

/// Two-stage construction: stable-leaf domain first; when its orbit union
/// misses coverage nodes, switch to the unstable leaf through the boundary
/// limit leaf and rebuild.
PipelineResult translation_pipeline(const LyapunovMetric& metric, const PlaneMap& map,
                                    const PipelineOptions& options = {});

}  // namespace planedyn
