#include "planedyn/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include "planedyn/error.hpp"

namespace planedyn {

namespace {

// ---------------------------------------------------------------------------
// Exact orientation
// ---------------------------------------------------------------------------

struct TwoTerm {
  double hi;
  double lo;
};

TwoTerm two_product(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

TwoTerm two_sum(double a, double b) {
  const double s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  return {s, (a - av) + (b - bv)};
}

// Grow-expansion: components stay non-overlapping and ordered by increasing
// magnitude, so the sign of the sum is the sign of the last nonzero entry.
void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  for (double& component : e) {
    const TwoTerm t = two_sum(q, component);
    component = t.lo;
    q = t.hi;
  }
  e.push_back(q);
}

int orient2d_exact(Point a, Point b, Point c) {
  // (ax-cx)(by-cy) - (ay-cy)(bx-cx) expanded into six exact products.
  const std::array<TwoTerm, 6> products = {
      two_product(a.x1, b.x2),  two_product(-a.x1, c.x2), two_product(-c.x1, b.x2),
      two_product(-a.x2, b.x1), two_product(a.x2, c.x1),  two_product(c.x2, b.x1),
  };
  std::vector<double> expansion;
  expansion.reserve(13);
  for (const TwoTerm& t : products) {
    grow_expansion(expansion, t.lo);
    grow_expansion(expansion, t.hi);
  }
  for (auto it = expansion.rbegin(); it != expansion.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Uniform grid over segments, used for pair queries
// ---------------------------------------------------------------------------

}  // namespace

namespace detail {

class SegmentGrid {
 public:
  SegmentGrid(std::span<const Point> vertices, const Box& bounds) : vertices_(vertices.begin(), vertices.end()) {
    const std::size_t segments = vertices.size() - 1;
    origin_ = bounds.lo;
    const double w = std::max(bounds.width(), 1e-12);
    const double h = std::max(bounds.height(), 1e-12);
    const double target = std::max<double>(1.0, static_cast<double>(segments));
    nx_ = static_cast<std::size_t>(std::clamp(std::sqrt(target * w / h), 1.0, 2048.0));
    ny_ = static_cast<std::size_t>(std::clamp(target / static_cast<double>(nx_), 1.0, 2048.0));
    cell_w_ = w / static_cast<double>(nx_);
    cell_h_ = h / static_cast<double>(ny_);

    offsets_.assign(nx_ * ny_ + 1, 0);
    for (std::size_t s = 0; s < segments; ++s) {
      for_cells(segment_box(s), [&](std::size_t cell) { ++offsets_[cell + 1]; });
    }
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    items_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t s = 0; s < segments; ++s) {
      for_cells(segment_box(s), [&](std::size_t cell) { items_[fill[cell]++] = static_cast<std::uint32_t>(s); });
    }
  }

  /// Segment indices whose cells overlap the query box (sorted, unique).
  void candidates(const Box& query, std::vector<std::uint32_t>& out) const {
    out.clear();
    for_cells(query, [&](std::size_t cell) {
      for (std::size_t k = offsets_[cell]; k < offsets_[cell + 1]; ++k) out.push_back(items_[k]);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  double cell_size() const { return std::max(cell_w_, cell_h_); }

  Box segment_box(std::size_t s) const {
    const Point a = vertices_[s];
    const Point b = vertices_[s + 1];
    return {{std::min(a.x1, b.x1), std::min(a.x2, b.x2)}, {std::max(a.x1, b.x1), std::max(a.x2, b.x2)}};
  }

 private:
  template <typename F>
  void for_cells(const Box& box, F&& f) const {
    const auto clamp_index = [](double v, std::size_t n) {
      if (!(v > 0.0)) return std::size_t{0};
      if (v >= static_cast<double>(n - 1)) return n - 1;
      return static_cast<std::size_t>(v);
    };
    const std::size_t i0 = clamp_index((box.lo.x1 - origin_.x1) / cell_w_, nx_);
    const std::size_t i1 = clamp_index((box.hi.x1 - origin_.x1) / cell_w_, nx_);
    const std::size_t j0 = clamp_index((box.lo.x2 - origin_.x2) / cell_h_, ny_);
    const std::size_t j1 = clamp_index((box.hi.x2 - origin_.x2) / cell_h_, ny_);
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i) f(j * nx_ + i);
  }

  std::vector<Point> vertices_;
  Point origin_;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  double cell_w_ = 1.0;
  double cell_h_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace detail

namespace {

using detail::SegmentGrid;

constexpr std::size_t kIndexedVertices = 64;

bool on_closed_segment_collinear(Point a, Point b, Point c) {
  return std::min(a.x1, b.x1) <= c.x1 && c.x1 <= std::max(a.x1, b.x1) && std::min(a.x2, b.x2) <= c.x2 &&
         c.x2 <= std::max(a.x2, b.x2);
}

// Closed-segment intersection, touching included.
bool segments_touch(Point a, Point b, Point c, Point d) {
  const int o1 = orient2d(a, b, c);
  const int o2 = orient2d(a, b, d);
  const int o3 = orient2d(c, d, a);
  const int o4 = orient2d(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_closed_segment_collinear(a, b, c)) return true;
  if (o2 == 0 && on_closed_segment_collinear(a, b, d)) return true;
  if (o3 == 0 && on_closed_segment_collinear(c, d, a)) return true;
  if (o4 == 0 && on_closed_segment_collinear(c, d, b)) return true;
  return false;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct SegmentCrossing {
  double t_on_a;
  Point point;
  int parity;
};

// Crossing of segment a0a1 with segment b0b1, where all of b is shifted by
// the infinitesimal vector (eps, eps^2).
std::optional<SegmentCrossing> segment_crossing(Point a0, Point a1, Point b0, Point b1) {
  const Point da = a1 - a0;
  const Point db = b1 - b0;
  const int ob0 = orient2d(a0, a1, b0);
  const int ob1 = orient2d(a0, a1, b1);

  if (ob0 == 0 && ob1 == 0) {
    // Collinear: the shift separates the lines unless they overlap in extent.
    const bool use_x = std::abs(da.x1) >= std::abs(da.x2);
    const auto coord = [use_x](Point p) { return use_x ? p.x1 : p.x2; };
    const double lo = std::max(std::min(coord(a0), coord(a1)), std::min(coord(b0), coord(b1)));
    const double hi = std::min(std::max(coord(a0), coord(a1)), std::max(coord(b0), coord(b1)));
    if (hi > lo) throw Error(ErrorKind::DegenerateOverlap, "collinear overlapping segments");
    return std::nullopt;
  }

  const auto shifted_b_side = [&](int o) {
    if (o != 0) return o;
    return da.x2 != 0.0 ? -sign_of(da.x2) : sign_of(da.x1);
  };
  const auto a_side_of_shifted_b = [&](int o) {
    if (o != 0) return o;
    return db.x2 != 0.0 ? sign_of(db.x2) : -sign_of(db.x1);
  };

  const int sb0 = shifted_b_side(ob0);
  const int sb1 = shifted_b_side(ob1);
  if (sb0 == sb1) return std::nullopt;
  const int oa0 = orient2d(b0, b1, a0);
  const int oa1 = orient2d(b0, b1, a1);
  const int sa0 = a_side_of_shifted_b(oa0);
  const int sa1 = a_side_of_shifted_b(oa1);
  if (sa0 == sa1) return std::nullopt;

  const double c = cross(da, db);
  if (std::abs(c) <= 1e-12 * norm(da) * norm(db)) {
    throw Error(ErrorKind::DegenerateOverlap, "near-parallel intersecting segments");
  }
  // Signed areas of a0, a1 relative to line b.
  const double fa0 = cross(db, a0 - b0);
  const double fa1 = cross(db, a1 - b0);
  double t = fa0 / (fa0 - fa1);
  if (!std::isfinite(t)) t = 0.5;
  t = std::clamp(t, 0.0, 1.0);
  return SegmentCrossing{t, a0 + t * da, c > 0.0 ? 1 : -1};
}

void require_finite(Point p, const char* what) {
  if (!p.finite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite coordinates");
}

double point_segment_distance(Point p, Point a, Point b, double* t_out = nullptr) {
  const Point d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  return distance(p, a + t * d);
}

}  // namespace

int orient2d(Point a, Point b, Point c) {
  const double detleft = (a.x1 - c.x1) * (b.x2 - c.x2);
  const double detright = (a.x2 - c.x2) * (b.x1 - c.x1);
  const double det = detleft - detright;
  const double errbound = 3.3306690738754716e-16 * (std::abs(detleft) + std::abs(detright));
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return orient2d_exact(a, b, c);
}

Box bounding_box(std::span<const Point> points) {
  Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
        {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Point& p : points) {
    b.lo.x1 = std::min(b.lo.x1, p.x1);
    b.lo.x2 = std::min(b.lo.x2, p.x2);
    b.hi.x1 = std::max(b.hi.x1, p.x1);
    b.hi.x2 = std::max(b.hi.x2, p.x2);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Polyline
// ---------------------------------------------------------------------------

Polyline::Polyline(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw Error(ErrorKind::InvalidArgument, "polyline needs at least two vertices");
  for (const Point& p : vertices_) require_finite(p, "polyline vertex");
  cumulative_.resize(vertices_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (vertices_[i] == vertices_[i - 1])
      throw Error(ErrorKind::InvalidArgument, "consecutive polyline vertices coincide at index " + std::to_string(i));
    cumulative_[i] = cumulative_[i - 1] + distance(vertices_[i], vertices_[i - 1]);
  }
  if (!std::isfinite(cumulative_.back())) throw Error(ErrorKind::NonFinite, "polyline length is not finite");
  bounds_ = bounding_box(vertices_);

  const std::size_t n = vertices_.size();
  // Adjacent segments may only meet at their shared vertex.
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const Point a = vertices_[i], b = vertices_[i + 1], c = vertices_[i + 2];
    if (orient2d(a, b, c) == 0 && dot(b - a, c - b) < 0.0)
      throw Error(ErrorKind::InvalidArgument, "polyline folds back on itself at vertex " + std::to_string(i + 1));
  }
  if (n < 4) return;
  auto shared = std::make_shared<const SegmentGrid>(vertices_, bounds_);
  const SegmentGrid& grid = *shared;
  if (n > kIndexedVertices) grid_ = shared;
  std::vector<std::uint32_t> cand;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    grid.candidates(grid.segment_box(s), cand);
    for (std::uint32_t t : cand) {
      if (t <= s + 1) continue;
      if (segments_touch(vertices_[s], vertices_[s + 1], vertices_[t], vertices_[t + 1]))
        throw Error(ErrorKind::InvalidArgument, "polyline self-intersects (segments " + std::to_string(s) +
                                                    " and " + std::to_string(t) + ")");
    }
  }
}

Point Polyline::point_at(double s) const {
  if (s <= 0.0) return vertices_.front();
  if (s >= length()) return vertices_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double seg = cumulative_[i + 1] - cumulative_[i];
  return lerp(vertices_[i], vertices_[i + 1], (s - cumulative_[i]) / seg);
}

Polyline::Projection Polyline::project(Point p) const {
  Projection best{0.0, vertices_.front(), std::numeric_limits<double>::infinity()};
  const auto consider = [&](std::size_t i) {
    const Point a = vertices_[i], b = vertices_[i + 1];
    // Cheap reject: the segment box is farther than the current best.
    const double gap_x = std::max({std::min(a.x1, b.x1) - p.x1, p.x1 - std::max(a.x1, b.x1), 0.0});
    const double gap_y = std::max({std::min(a.x2, b.x2) - p.x2, p.x2 - std::max(a.x2, b.x2), 0.0});
    if (gap_x >= best.distance || gap_y >= best.distance) return;
    double t = 0.0;
    const double d = point_segment_distance(p, a, b, &t);
    if (d < best.distance) {
      best.distance = d;
      best.point = lerp(a, b, t);
      best.arclength = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
    }
  };
  if (!grid_) {
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) consider(i);
    return best;
  }
  // Growing box queries; once a segment within the box radius is known, no
  // segment outside the box can be closer.
  double r = std::max(grid_->cell_size(), -bounds_.depth(p));
  std::vector<std::uint32_t> cand;
  while (true) {
    grid_->candidates(Box{{p.x1 - r, p.x2 - r}, {p.x1 + r, p.x2 + r}}, cand);
    for (std::uint32_t i : cand) consider(i);
    if (best.distance <= r) return best;
    r *= 2.0;
  }
}

std::size_t Polyline::nearest_vertex(Point p) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  const auto consider = [&](std::size_t i) {
    const double d = distance(p, vertices_[i]);
    if (d < best_d || (d == best_d && i < best)) {
      best_d = d;
      best = i;
    }
  };
  if (!grid_) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) consider(i);
    return best;
  }
  double r = std::max(grid_->cell_size(), -bounds_.depth(p));
  std::vector<std::uint32_t> cand;
  while (true) {
    grid_->candidates(Box{{p.x1 - r, p.x2 - r}, {p.x1 + r, p.x2 + r}}, cand);
    for (std::uint32_t i : cand) {
      consider(i);
      consider(i + 1);
    }
    if (best_d <= r) return best;
    r *= 2.0;
  }
}

Polyline Polyline::reversed() const {
  std::vector<Point> v(vertices_.rbegin(), vertices_.rend());
  return Polyline(std::move(v));
}

// ---------------------------------------------------------------------------
// Crossings and separation
// ---------------------------------------------------------------------------

CrossingReport crossing_points(const Polyline& a, const Polyline& b) {
  if (a.front() == b.front() || a.front() == b.back() || a.back() == b.front() || a.back() == b.back())
    throw Error(ErrorKind::InvalidArgument, "polylines share an endpoint");

  struct Hit {
    std::size_t segment;
    SegmentCrossing crossing;
  };
  std::vector<Hit> hits;
  const auto& av = a.vertices();
  const auto& bv = b.vertices();

  if (!a.bounds().overlaps(b.bounds())) return {};

  const auto test = [&](std::size_t i, std::size_t j) {
    if (auto c = segment_crossing(av[i], av[i + 1], bv[j], bv[j + 1])) hits.push_back({i, *c});
  };
  const auto seg_box = [](Point p, Point q) {
    return Box{{std::min(p.x1, q.x1), std::min(p.x2, q.x2)}, {std::max(p.x1, q.x1), std::max(p.x2, q.x2)}};
  };

  if (b.grid_ && a.segment_count() <= 4) {
    std::vector<std::uint32_t> cand;
    for (std::size_t i = 0; i < a.segment_count(); ++i) {
      const Box ba = seg_box(av[i], av[i + 1]);
      if (!ba.overlaps(b.bounds())) continue;
      b.grid_->candidates(ba, cand);
      for (std::uint32_t j : cand) {
        if (ba.overlaps(b.grid_->segment_box(j))) test(i, j);
      }
    }
  } else if (a.segment_count() * b.segment_count() <= 4096 || std::min(a.segment_count(), b.segment_count()) <= 4) {
    for (std::size_t i = 0; i < a.segment_count(); ++i) {
      const Box ba = seg_box(av[i], av[i + 1]);
      if (!ba.overlaps(b.bounds())) continue;
      for (std::size_t j = 0; j < b.segment_count(); ++j) {
        if (ba.overlaps(seg_box(bv[j], bv[j + 1]))) test(i, j);
      }
    }
  } else {
    const std::shared_ptr<const SegmentGrid> owned =
        b.grid_ ? nullptr : std::make_shared<const SegmentGrid>(bv, b.bounds());
    const SegmentGrid& grid = b.grid_ ? *b.grid_ : *owned;
    std::vector<std::uint32_t> cand;
    for (std::size_t i = 0; i < a.segment_count(); ++i) {
      const Box ba = seg_box(av[i], av[i + 1]);
      if (!ba.overlaps(b.bounds())) continue;
      grid.candidates(ba, cand);
      for (std::uint32_t j : cand) {
        if (ba.overlaps(grid.segment_box(j))) test(i, j);
      }
    }
  }

  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
    if (x.segment != y.segment) return x.segment < y.segment;
    return x.crossing.t_on_a < y.crossing.t_on_a;
  });
  CrossingReport report;
  report.count = hits.size();
  for (const Hit& h : hits) {
    report.points.push_back(h.crossing.point);
    report.parities.push_back(h.crossing.parity);
    const double s0 = a.arclength_at(h.segment);
    const double s1 = a.arclength_at(h.segment + 1);
    report.arclengths.push_back(s0 + h.crossing.t_on_a * (s1 - s0));
  }
  return report;
}

bool separates(const Polyline& curve, Point p, Point q, const SeparationOptions& options) {
  require_finite(p, "p");
  require_finite(q, "q");
  if (curve.distance_to(p) <= options.tolerance || curve.distance_to(q) <= options.tolerance)
    throw Error(ErrorKind::Inconclusive, "point lies within tolerance of the curve");
  if (p == q) return false;

  if (options.window) {
    const Box& w = *options.window;
    if (!w.contains(p) || !w.contains(q)) throw Error(ErrorKind::Inconclusive, "point outside the window");
    for (Point end : {curve.front(), curve.back()}) {
      if (w.depth(end) > options.tolerance)
        throw Error(ErrorKind::Inconclusive, "curve terminates inside the window");
    }
  } else {
    const Polyline seg({p, q});
    const double reach = norm(q - p);
    for (Point end : {curve.front(), curve.back()}) {
      if (seg.distance_to(end) <= reach) throw Error(ErrorKind::Inconclusive, "curve terminates near the points");
    }
  }

  try {
    const CrossingReport r = crossing_points(Polyline({p, q}), curve);
    return r.count % 2 == 1;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateOverlap) throw Error(ErrorKind::Inconclusive, e.what());
    throw;
  }
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Inside: return "Inside";
    case Region::Outside: return "Outside";
    case Region::Boundary: return "Boundary";
  }
  return "?";
}

Region region_between_membership(const Polyline& lower, const Polyline& upper, Point p,
                                 const MembershipOptions& options) {
  require_finite(p, "p");
  Box window;
  if (options.window) {
    window = *options.window;
  } else {
    window = lower.bounds();
    const Box& u = upper.bounds();
    window.lo = {std::min(window.lo.x1, u.lo.x1), std::min(window.lo.x2, u.lo.x2)};
    window.hi = {std::max(window.hi.x1, u.hi.x1), std::max(window.hi.x2, u.hi.x2)};
  }
  if (!window.contains(p)) throw Error(ErrorKind::Inconclusive, "point outside the sampled window");
  const Polyline::Projection on_lower = lower.project(p);
  const Polyline::Projection on_upper = upper.project(p);
  if (on_lower.distance <= options.boundary_tolerance || on_upper.distance <= options.boundary_tolerance)
    return Region::Boundary;
  if (options.window) {
    for (const Polyline* c : {&lower, &upper})
      for (Point end : {c->front(), c->back()})
        if (window.depth(end) > std::min(1e-9, options.boundary_tolerance))
          throw Error(ErrorKind::Inconclusive, "curve terminates inside the window");
  }

  // p is inside iff neither curve cuts the segment from p to its foot on the
  // other curve.
  const auto cuts = [&](const Polyline& curve, Point foot) {
    try {
      return crossing_points(Polyline({p, foot}), curve).count % 2 == 1;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateOverlap) throw Error(ErrorKind::Inconclusive, e.what());
      throw;
    }
  };
  const bool cut_by_lower = cuts(lower, on_upper.point);
  const bool cut_by_upper = cuts(upper, on_lower.point);
  return (!cut_by_lower && !cut_by_upper) ? Region::Inside : Region::Outside;
}

double hausdorff_one_sided(const Polyline& from, const Polyline& to, const std::optional<Box>& window) {
  double worst = 0.0;
  for (const Point& v : from.vertices()) {
    if (window && !window->contains(v)) continue;
    worst = std::max(worst, to.distance_to(v));
  }
  return worst;
}

double hausdorff(const Polyline& a, const Polyline& b) {
  return std::max(hausdorff_one_sided(a, b), hausdorff_one_sided(b, a));
}

}  // namespace planedyn
