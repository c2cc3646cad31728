#pragma once

// Reference values computed without the library: closed forms written out
// from scratch, brute-force sums and hand-composed maps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

struct P {
  double x, y;
};

inline double ln(double l) { return std::log(l); }

// Translation-adapted exact form.
inline double ds_exact(double l, P p, P q) { return std::fabs(std::pow(l, -p.x) - std::pow(l, -q.x)) / ln(l); }
inline double du_exact(double l, P p, P q) { return std::fabs(std::pow(l, p.x) * p.y - std::pow(l, q.x) * q.y); }
inline double u_exact(double l, P p, P q) { return ds_exact(l, p, q) + du_exact(l, p, q); }

// Strip-restricted unstable part.
inline double du_strip(double l, P p, P q) { return std::pow(l, std::min(p.x, q.x)) * std::fabs(p.y - q.y); }

// Split metric for diag(l, 1/l).
inline double u_split(P p, P q) { return std::fabs(p.y - q.y) + std::fabs(p.x - q.x); }

inline P shift(P p, int n) { return {p.x + n, p.y}; }
inline P hyperbolic(double l, P p, int n) { return {p.x * std::pow(l, n), p.y * std::pow(l, -n)}; }

// H(x, y) = (x, y + a sin x) and g = H^{-1} o T o H, composed by hand.
inline P shear(double a, P p) { return {p.x, p.y + a * std::sin(p.x)}; }
inline P unshear(double a, P p) { return {p.x, p.y - a * std::sin(p.x)}; }
inline P conj_shift(double a, P p) { return unshear(a, shift(shear(a, p), 1)); }

// First and second differences under the unit shift, by direct evaluation.
inline double v_shift(double l, P x, P y) { return u_exact(l, shift(x, 1), shift(y, 1)) - u_exact(l, x, y); }
inline double w_shift(double l, P x, P y) { return v_shift(l, shift(x, 1), shift(y, 1)) - v_shift(l, x, y); }

// Weighted path integral over a polygon by the composite midpoint rule
// with m subintervals per segment.
inline double path_cost_midpoint(bool stable, double l, const std::vector<P>& path, int m = 20000) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const P a = path[i], b = path[i + 1];
    for (int j = 0; j < m; ++j) {
      const double t = (j + 0.5) / m;
      const double x = a.x + t * (b.x - a.x);
      const double w = stable ? std::pow(l, -x) * std::fabs(b.x - a.x) : std::pow(l, x) * std::fabs(b.y - a.y);
      total += w / m;
    }
  }
  return total;
}

// Level curves: stable leaves of the shift under the exact form are
// l^{x} y = c, unstable leaves are vertical lines.
inline double stable_level(double l, P p) { return std::pow(l, p.x) * p.y; }

// Distance from p to the graph y = c l^{-x}, by dense sampling of the
// graph around p (upper bound within the sampling resolution).
inline double distance_to_graph(double l, double c, P p, double half_span = 2.0, int samples = 4001) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = p.x - half_span + 2.0 * half_span * i / (samples - 1);
    const double y = c * std::pow(l, -x);
    best = std::min(best, std::hypot(p.x - x, p.y - y));
  }
  return best;
}

// Segment-polygon distance by brute force over segments.
inline double distance_to_polyline(P p, const std::vector<P>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const P a = poly[i], b = poly[i + 1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy)));
  }
  return best;
}

// Count of proper crossings of two polygons, O(nm).
inline int brute_crossings(const std::vector<P>& a, const std::vector<P>& b) {
  const auto orient = [](P p, P q, P r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 0) - (v < 0);
  };
  int n = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      const int o1 = orient(a[i], a[i + 1], b[j]), o2 = orient(a[i], a[i + 1], b[j + 1]);
      const int o3 = orient(b[j], b[j + 1], a[i]), o4 = orient(b[j], b[j + 1], a[i + 1]);
      if (o1 * o2 < 0 && o3 * o4 < 0) ++n;
    }
  return n;
}

}  // namespace oracle
