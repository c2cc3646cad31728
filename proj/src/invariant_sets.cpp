#include "planedyn/invariant_sets.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "golden.hpp"
#include "parallel.hpp"
#include "planedyn/error.hpp"

namespace planedyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// A leaf end is abandoned once the step would drop below step / kStepHalvings.
constexpr double kStepHalvings = 16.0;

double u_or_inf(const LyapunovMetric& metric, Point p, Point q) {
  try {
    return metric(p, q);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Overflow) return kInf;
    throw;
  }
}

// Orbit of a reference point, reused for every candidate compared against it.
class ReferenceOrbit {
 public:
  ReferenceOrbit(const LyapunovMetric& metric, const PlaneMap& map, Point c, int n_max, int direction, double k)
      : metric_(metric), map_(map), direction_(direction), k_(k) {
    orbit_.reserve(static_cast<std::size_t>(n_max) + 1);
    orbit_.push_back(c);
    for (int n = 1; n <= n_max; ++n) {
      try {
        orbit_.push_back(step(map, orbit_.back(), direction));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        break;
      }
    }
  }

  // U(f^N c, f^N v) at the last representable iterate; +inf on overflow.
  double final_separation(Point v) const {
    double u = u_or_inf(metric_, orbit_[0], v);
    for (std::size_t n = 1; n < orbit_.size(); ++n) {
      try {
        v = step(map_, v, direction_);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        return kInf;
      }
      u = u_or_inf(metric_, orbit_[n], v);
      if (!std::isfinite(u)) return kInf;
    }
    return u;
  }

  bool escapes(Point v) const { return first_escape(v).has_value(); }

  std::optional<int> first_escape(Point v) const {
    if (u_or_inf(metric_, orbit_[0], v) > k_) return 0;
    for (std::size_t n = 1; n < orbit_.size(); ++n) {
      try {
        v = step(map_, v, direction_);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        return static_cast<int>(n);
      }
      if (u_or_inf(metric_, orbit_[n], v) > k_) return static_cast<int>(n);
    }
    return std::nullopt;
  }

  double max_ratio(Point v) const {
    double worst = u_or_inf(metric_, orbit_[0], v);
    for (std::size_t n = 1; n < orbit_.size(); ++n) {
      try {
        v = step(map_, v, direction_);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        return kInf;
      }
      worst = std::max(worst, u_or_inf(metric_, orbit_[n], v));
    }
    return worst / k_;
  }

 private:
  const LyapunovMetric& metric_;
  const PlaneMap& map_;
  int direction_;
  double k_;
  std::vector<Point> orbit_;
};

Point unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Locates the leaf point on the transversal center + s n, |s| <= half.
std::optional<Point> locate_on_transversal(const ReferenceOrbit& ref, Point center, Point n, double half) {
  const auto at = [&](double s) { return center + s * n; };
  std::optional<double> hit;
  const auto objective = [&](double s) { return ref.final_separation(at(s)); };
  const auto found = [&](double s) {
    if (hit) return true;
    if (!ref.escapes(at(s))) hit = s;
    return hit.has_value();
  };
  double width = 0.0;
  const double s_min = detail::golden_min(objective, -half, half, 300, found, &width);
  if (!hit) {
    if (ref.escapes(at(s_min))) return std::nullopt;
    hit = s_min;
  }
  const double s0 = *hit;
  const double scale = std::max(width, 1e-16 * (1.0 + norm(center)));

  // Edge of the NoEscape plateau on one side of s0.
  const auto edge = [&](double sign) {
    const double limit = half - sign * s0;
    double inside = 0.0;
    double outside = limit;
    for (double delta = scale;; delta *= 2.0) {
      if (delta >= limit) {
        if (!ref.escapes(at(s0 + sign * limit))) return s0 + sign * limit;
        break;
      }
      if (ref.escapes(at(s0 + sign * delta))) {
        outside = delta;
        break;
      }
      inside = delta;
    }
    for (int it = 0; it < 24; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid <= inside || mid >= outside) break;
      if (ref.escapes(at(s0 + sign * mid))) outside = mid;
      else inside = mid;
    }
    return s0 + sign * 0.5 * (inside + outside);
  };
  const double lo = edge(-1.0);
  const double hi = edge(1.0);
  return at(0.5 * (lo + hi));
}

// Fraction t in (0, 1] where the segment a->b leaves the box.
double exit_fraction(const Box& box, Point a, Point b) {
  double t = 1.0;
  const Point d = b - a;
  const auto clip = [&](double start, double delta, double lo, double hi) {
    if (delta > 0.0 && start + delta > hi) t = std::min(t, (hi - start) / delta);
    if (delta < 0.0 && start + delta < lo) t = std::min(t, (lo - start) / delta);
  };
  clip(a.x1, d.x1, box.lo.x1, box.hi.x1);
  clip(a.x2, d.x2, box.lo.x2, box.hi.x2);
  return std::max(t, 0.0);
}

double initial_tangent(const LyapunovMetric& metric, const PlaneMap& map, Point x, int direction, double radius,
                       int n_max) {
  const ReferenceOrbit ref(metric, map, x, n_max, direction, kInf);
  const int samples = 360;
  const double dtheta = std::numbers::pi / samples;
  double best_theta = 0.0;
  double best = kInf;
  for (int i = 0; i < samples; ++i) {
    const double theta = i * dtheta;
    const double r = ref.final_separation(x + radius * unit(theta));
    if (r < best) {
      best = r;
      best_theta = theta;
    }
  }
  return detail::golden_min([&](double th) { return ref.final_separation(x + radius * unit(th)); },
                            best_theta - dtheta, best_theta + dtheta, 80);
}

}  // namespace

const char* to_string(Stability s) { return s == Stability::Stable ? "stable" : "unstable"; }

std::optional<int> escape_time(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y, double k,
                               int n_max, int direction) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "N_max must be at least 1");
  if (!x.finite() || !y.finite()) throw Error(ErrorKind::NonFinite, "escape_time arguments");
  if (x == y) return std::nullopt;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      try {
        x = step(map, x, direction);
        y = step(map, y, direction);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Overflow) return n;
        throw;
      }
    }
    if (u_or_inf(metric, x, y) > k) return n;
  }
  return std::nullopt;
}

EscapeTimeField escape_time_field(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k, int n_max,
                                  const GridSpec& grid, int direction) {
  if (!(grid.spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "N_max must be at least 1");
  EscapeTimeField field;
  field.grid = grid;
  field.n_max = n_max;
  field.k = k;
  field.direction = direction;
  field.nx = static_cast<std::size_t>(std::floor(grid.window.width() / grid.spacing + 1e-9)) + 1;
  field.ny = static_cast<std::size_t>(std::floor(grid.window.height() / grid.spacing + 1e-9)) + 1;
  field.values.assign(field.nx * field.ny, kNoEscape);

  const ReferenceOrbit ref(metric, map, x, n_max, direction, k);
  detail::parallel_for(field.values.size(), [&](std::size_t idx) {
    const Point p = field.node(idx % field.nx, idx / field.nx);
    if (p == x) return;
    if (auto n = ref.first_escape(p)) field.values[idx] = *n;
  });
  return field;
}

std::vector<Point> StableComponent::points() const {
  std::vector<Point> out;
  out.reserve(nodes.size());
  for (std::size_t idx : nodes) out.push_back(field.node(idx % field.nx, idx / field.nx));
  return out;
}

bool StableComponent::contains_node(std::size_t i, std::size_t j) const {
  return std::binary_search(nodes.begin(), nodes.end(), j * field.nx + i);
}

StableComponent k_stable_component(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k, int n_max,
                                   const GridSpec& grid, int direction) {
  if (!grid.window.contains(x)) throw Error(ErrorKind::InvalidArgument, "x must lie inside the grid window");
  StableComponent comp{escape_time_field(metric, map, x, k, n_max, grid, direction), {}};
  const EscapeTimeField& f = comp.field;
  const auto clamp_index = [](double v, std::size_t count) {
    const double r = std::round(v);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(count - 1)));
  };
  const std::size_t i0 = clamp_index((x.x1 - grid.window.lo.x1) / grid.spacing, f.nx);
  const std::size_t j0 = clamp_index((x.x2 - grid.window.lo.x2) / grid.spacing, f.ny);
  if (f.at(i0, j0) != kNoEscape)
    throw Error(ErrorKind::EmptyComponent, "the grid node nearest x escapes; refine the grid");

  std::vector<char> seen(f.values.size(), 0);
  std::deque<std::size_t> queue{j0 * f.nx + i0};
  seen[j0 * f.nx + i0] = 1;
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    comp.nodes.push_back(idx);
    const std::size_t i = idx % f.nx, j = idx / f.nx;
    const auto visit = [&](std::size_t ii, std::size_t jj) {
      const std::size_t n = jj * f.nx + ii;
      if (!seen[n] && f.values[n] == kNoEscape) {
        seen[n] = 1;
        queue.push_back(n);
      }
    };
    if (i > 0) visit(i - 1, j);
    if (i + 1 < f.nx) visit(i + 1, j);
    if (j > 0) visit(i, j - 1);
    if (j + 1 < f.ny) visit(i, j + 1);
  }
  std::sort(comp.nodes.begin(), comp.nodes.end());
  return comp;
}

LeafCurve trace_leaf(const LyapunovMetric& metric, const PlaneMap& map, Point x, Stability stability,
                     const TraceOptions& options) {
  if (!(options.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(options.k > 0.0)) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (options.n_max < 1) throw Error(ErrorKind::InvalidArgument, "N_max must be at least 1");
  if (!(options.arclength_budget > 0.0)) throw Error(ErrorKind::InvalidArgument, "arclength budget must be positive");
  if (!x.finite()) throw Error(ErrorKind::NonFinite, "leaf base point");
  if (!options.window.contains(x)) throw Error(ErrorKind::InvalidArgument, "leaf base point outside the window");

  const int direction = iteration_direction(stability);
  const double h = options.step;
  const double theta = initial_tangent(metric, map, x, direction, h, options.n_max);
  const Point tangent0 = unit(theta);

  Truncation trunc{options.n_max, options.k, h, options.arclength_budget, false, false, h};

  const double min_step = h / kStepHalvings;
  const auto march = [&](Point t, bool& at_window) {
    std::vector<Point> out;
    Point prev = x;
    double length = 0.0;
    double hc = h;
    int streak = 0;
    while (length < 0.5 * options.arclength_budget) {
      const ReferenceOrbit ref(metric, map, prev, options.n_max, direction, options.k);
      const auto v = locate_on_transversal(ref, prev + hc * t, perpendicular(t), hc);
      if (!v) {
        // Consecutive vertices too far apart in U for this k: shorten the step.
        if (hc * 0.5 < min_step) {
          if (out.empty()) throw Error(ErrorKind::LeafLost, "no NoEscape point on the transversal");
          break;
        }
        hc *= 0.5;
        streak = 0;
        continue;
      }
      trunc.smallest_step = std::min(trunc.smallest_step, hc);
      if (!options.window.contains(*v)) {
        const double frac = exit_fraction(options.window, prev, *v);
        Point clipped = lerp(prev, *v, frac);
        // Slide the clipped point along the window edge back onto the leaf.
        const bool vertical_edge = std::min(std::abs(clipped.x1 - options.window.lo.x1),
                                            std::abs(clipped.x1 - options.window.hi.x1)) <=
                                   std::min(std::abs(clipped.x2 - options.window.lo.x2),
                                            std::abs(clipped.x2 - options.window.hi.x2));
        const Point along = vertical_edge ? Point{0.0, 1.0} : Point{1.0, 0.0};
        if (const auto on_edge = locate_on_transversal(ref, clipped, along, hc);
            on_edge && options.window.contains(*on_edge) && distance(*on_edge, clipped) < hc)
          clipped = *on_edge;
        if (distance(clipped, prev) > 1e-12) out.push_back(clipped);
        at_window = true;
        break;
      }
      const double d = distance(*v, prev);
      t = (1.0 / d) * (*v - prev);
      length += d;
      prev = *v;
      out.push_back(prev);
      if (hc < h && ++streak >= 16) {
        hc = std::min(h, 2.0 * hc);
        streak = 0;
      }
    }
    return out;
  };

  std::vector<Point> back = march(-1.0 * tangent0, trunc.front_at_window);
  std::vector<Point> ahead = march(tangent0, trunc.back_at_window);

  std::vector<Point> vertices;
  vertices.reserve(back.size() + ahead.size() + 1);
  vertices.assign(back.rbegin(), back.rend());
  const std::size_t base_index = vertices.size();
  vertices.push_back(x);
  vertices.insert(vertices.end(), ahead.begin(), ahead.end());

  try {
    return LeafCurve{x, stability, Polyline(std::move(vertices)), trunc, options.window, base_index};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::LeafLost, std::string("traced leaf is not simple: ") + e.what());
    throw;
  }
}

double leaf_membership_ratio(const LyapunovMetric& metric, const PlaneMap& map, const LeafCurve& leaf) {
  const auto& v = leaf.polyline.vertices();
  const int direction = iteration_direction(leaf.stability);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const ReferenceOrbit ref(metric, map, v[i], leaf.truncation.n_max, direction, leaf.truncation.k);
    worst = std::max(worst, ref.max_ratio(v[i + 1]));
  }
  return worst;
}

CrossingReport leaf_pair_intersection(const LeafCurve& stable, const LeafCurve& unstable) {
  if (stable.stability != Stability::Stable || unstable.stability != Stability::Unstable)
    throw Error(ErrorKind::InvalidArgument, "expected a stable and an unstable leaf");
  if (!stable.window.overlaps(unstable.window))
    throw Error(ErrorKind::InvalidArgument, "leaf windows do not overlap");
  return crossing_points(stable.polyline, unstable.polyline);
}

ArmCount count_leaf_arms(const LyapunovMetric& metric, const PlaneMap& map, Point x, Stability stability,
                         double radius, int n_max, int samples) {
  if (!(radius > 0.0) || samples < 8) throw Error(ErrorKind::InvalidArgument, "need radius > 0 and >= 8 samples");
  const ReferenceOrbit ref(metric, map, x, n_max, iteration_direction(stability), kInf);
  std::vector<double> r(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    r[static_cast<std::size_t>(i)] = ref.final_separation(x + radius * unit(2.0 * std::numbers::pi * i / samples));

  // Cyclic strict local minima; a run of equal values counts once.
  const std::size_t m = r.size();
  int arms = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = r[(i + m - 1) % m];
    if (!(r[i] < prev)) continue;
    std::size_t j = (i + 1) % m;
    std::size_t guard = 0;
    while (r[j] == r[i] && guard++ < m) j = (j + 1) % m;
    if (r[i] < r[j]) ++arms;
  }
  return {arms, arms >= 3};
}

}  // namespace planedyn
