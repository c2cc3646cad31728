#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace planedyn {

namespace detail {
class SegmentGrid;
}

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point operator*(double s, Point a) { return {s * a.x1, s * a.x2}; }
  friend Point operator*(Point a, double s) { return {s * a.x1, s * a.x2}; }
  friend bool operator==(Point a, Point b) = default;

  bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
};

inline double dot(Point a, Point b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Point a, Point b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point lerp(Point a, Point b, double t) { return a + t * (b - a); }
inline Point perpendicular(Point a) { return {-a.x2, a.x1}; }

/// Axis-aligned box; the default sampling window is [-64, 64]^2.
struct Box {
  Point lo{-64.0, -64.0};
  Point hi{64.0, 64.0};

  static Box square(double half_width) { return {{-half_width, -half_width}, {half_width, half_width}}; }

  bool contains(Point p, double slack = 0.0) const {
    return p.x1 >= lo.x1 - slack && p.x1 <= hi.x1 + slack && p.x2 >= lo.x2 - slack &&
           p.x2 <= hi.x2 + slack;
  }
  /// Distance from an interior point to the nearest edge; negative outside.
  double depth(Point p) const {
    return std::min(std::min(p.x1 - lo.x1, hi.x1 - p.x1), std::min(p.x2 - lo.x2, hi.x2 - p.x2));
  }
  Box shrunk(double margin) const {
    return {{lo.x1 + margin, lo.x2 + margin}, {hi.x1 - margin, hi.x2 - margin}};
  }
  bool overlaps(const Box& o) const {
    return lo.x1 <= o.hi.x1 && o.lo.x1 <= hi.x1 && lo.x2 <= o.hi.x2 && o.lo.x2 <= hi.x2;
  }
  double width() const { return hi.x1 - lo.x1; }
  double height() const { return hi.x2 - lo.x2; }
};

Box bounding_box(std::span<const Point> points);

/// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise,
/// -1 clockwise, 0 collinear. Exact for all finite doubles (floating filter
/// with an expansion-arithmetic fallback).
int orient2d(Point a, Point b, Point c);

struct CrossingReport {
  std::size_t count = 0;
  std::vector<Point> points;
  /// +1 when b crosses a from its right side to its left side, -1 otherwise.
  std::vector<int> parities;
  /// Arclength along a of each crossing.
  std::vector<double> arclengths;
};

/// Open polyline with validated geometry: at least two vertices, finite
/// coordinates, distinct consecutive vertices, no self-intersection.
class Polyline {
 public:
  explicit Polyline(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t segment_count() const { return vertices_.size() - 1; }
  bool closed() const { return false; }
  Point front() const { return vertices_.front(); }
  Point back() const { return vertices_.back(); }
  const Box& bounds() const { return bounds_; }

  double length() const { return cumulative_.back(); }
  /// Arclength from the first vertex to vertex i.
  double arclength_at(std::size_t i) const { return cumulative_[i]; }
  /// Point at arclength s, clamped to [0, length()].
  Point point_at(double s) const;

  struct Projection {
    double arclength = 0.0;
    Point point;
    double distance = 0.0;
  };
  Projection project(Point p) const;
  double distance_to(Point p) const { return project(p).distance; }
  std::size_t nearest_vertex(Point p) const;

  Polyline reversed() const;

 private:
  std::vector<Point> vertices_;
  std::vector<double> cumulative_;
  Box bounds_;
  /// Segment index for long polylines; shared between copies.
  std::shared_ptr<const detail::SegmentGrid> grid_;

  friend CrossingReport crossing_points(const Polyline& a, const Polyline& b);
};


/// All transversal intersections of b with a, ordered along a. Degenerate
/// contacts (a vertex exactly on the other curve) are resolved by a symbolic
/// infinitesimal shift of b, so parity is always consistent; collinear
/// overlaps and near-parallel intersecting segments raise DegenerateOverlap.
CrossingReport crossing_points(const Polyline& a, const Polyline& b);

struct SeparationOptions {
  double tolerance = 1e-9;
  /// When set, p and q must lie in the window and the curve must not end
  /// strictly inside it. Otherwise both curve ends must be farther from the
  /// segment pq than its length.
  std::optional<Box> window;
};

/// Crossing-parity proxy for "curve separates p from q".
bool separates(const Polyline& curve, Point p, Point q, const SeparationOptions& options = {});

enum class Region { Inside, Outside, Boundary };
const char* to_string(Region r);

struct MembershipOptions {
  double boundary_tolerance = 1e-6;
  std::optional<Box> window;
};

/// Classifies p against the open region bounded by two disjoint proper curves.
Region region_between_membership(const Polyline& lower, const Polyline& upper, Point p,
                                 const MembershipOptions& options = {});

/// max over vertices of `from` inside `window` (all when unset) of the
/// distance to the polyline `to`. Returns 0 when no vertex is in the window.
double hausdorff_one_sided(const Polyline& from, const Polyline& to,
                           const std::optional<Box>& window = std::nullopt);
double hausdorff(const Polyline& a, const Polyline& b);

/// Pointwise image of a polyline; the result is re-validated.
template <typename F>
Polyline map_polyline(const Polyline& line, F&& f) {
  std::vector<Point> out;
  out.reserve(line.size());
  for (const Point& v : line.vertices()) out.push_back(f(v));
  return Polyline(std::move(out));
}

}  // namespace planedyn
