#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "planedyn/geometry.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"

namespace planedyn {

enum class Stability { Stable, Unstable };
const char* to_string(Stability s);

/// Stable sets iterate forward, unstable sets backward.
inline int iteration_direction(Stability s) { return s == Stability::Stable ? 1 : -1; }

/// First n in [0, n_max] with U(f^n x, f^n y) > k iterating in `direction`
/// (+1 or -1); empty means NoEscape. Overflow counts as escape.
std::optional<int> escape_time(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y, double k,
                               int n_max, int direction);

struct GridSpec {
  Box window = Box::square(3.0);
  double spacing = 0.01;
};

inline constexpr int kNoEscape = -1;

struct EscapeTimeField {
  GridSpec grid;
  std::size_t nx = 0;
  std::size_t ny = 0;
  /// Row-major (j * nx + i); kNoEscape where the bound held through n_max.
  std::vector<int> values;
  int n_max = 0;
  double k = 0.0;
  int direction = 1;

  Point node(std::size_t i, std::size_t j) const {
    return {grid.window.lo.x1 + static_cast<double>(i) * grid.spacing,
            grid.window.lo.x2 + static_cast<double>(j) * grid.spacing};
  }
  int at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
};

EscapeTimeField escape_time_field(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k, int n_max,
                                  const GridSpec& grid, int direction = 1);

struct StableComponent {
  EscapeTimeField field;
  /// Flat node indices (j * nx + i), sorted.
  std::vector<std::size_t> nodes;

  std::vector<Point> points() const;
  bool contains_node(std::size_t i, std::size_t j) const;
};

/// 4-connected flood fill of NoEscape nodes from the node nearest x.
/// Raises EmptyComponent if that node escapes.
StableComponent k_stable_component(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k, int n_max,
                                   const GridSpec& grid, int direction = 1);

struct TraceOptions {
  double k = 1.0;
  int n_max = 40;
  double step = 0.02;
  double arclength_budget = 256.0;
  Box window;
};

struct Truncation {
  int n_max = 0;
  double k = 0.0;
  double step = 0.0;
  double arclength_budget = 0.0;
  /// Whether each end stopped on the window edge (rather than the budget).
  bool front_at_window = false;
  bool back_at_window = false;
  /// The step is halved (down to step/16) where consecutive vertices would
  /// be more than k apart; an end that needs less stops inside the window.
  double smallest_step = 0.0;
};

struct LeafCurve {
  Point base;
  Stability stability = Stability::Stable;
  Polyline polyline;
  Truncation truncation;
  Box window;
  /// Index of the base point among the polyline vertices.
  std::size_t base_index = 0;
};

/// Continuation tracing of the stable or unstable leaf through x. Each new
/// vertex is located on a transversal of half-length `step` as the midpoint
/// of the NoEscape plateau relative to the previous vertex. Raises LeafLost
/// when no step at all can be taken from x.
LeafCurve trace_leaf(const LyapunovMetric& metric, const PlaneMap& map, Point x, Stability stability,
                     const TraceOptions& options = {});

/// max over consecutive vertices (v, w) of max_n U(f^n v, f^n w) / k, with
/// n in [0, n_max] along the leaf's direction. <= 1.05 is the leaf contract.
double leaf_membership_ratio(const LyapunovMetric& metric, const PlaneMap& map, const LeafCurve& leaf);

/// Crossings of the unstable leaf with the stable leaf.
CrossingReport leaf_pair_intersection(const LeafCurve& stable, const LeafCurve& unstable);

struct ArmCount {
  int arms = 0;
  bool singular = false;  // arms >= 3
};

/// Counts local minima of the separation U(f^N x, f^N y) for y on a circle
/// of the given radius about x; a regular point has two arms.
ArmCount count_leaf_arms(const LyapunovMetric& metric, const PlaneMap& map, Point x, Stability stability,
                         double radius, int n_max = 40, int samples = 720);

}  // namespace planedyn
