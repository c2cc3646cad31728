#include "planedyn/translation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "golden.hpp"
#include "planedyn/error.hpp"

namespace planedyn {

namespace {

constexpr double kStallFloor = 1e-14;

constexpr double kInf = std::numeric_limits<double>::infinity();

double u_or_inf(const LyapunovMetric& metric, Point p, Point q) {
  try {
    return metric(p, q);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Overflow) return kInf;
    throw;
  }
}

// U(f^N a, f^N c): minimal exactly when c is on the leaf through a.
double surrogate(const LyapunovMetric& metric, const PlaneMap& map, Point a, Point c, int direction, int n) {
  try {
    for (int i = 0; i < n; ++i) {
      a = step(map, a, direction);
      c = step(map, c, direction);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Overflow) throw;
    return kInf;
  }
  return u_or_inf(metric, a, c);
}

Point pow_map(const PlaneMap& map, Point p, int power) {
  for (int i = 0; i < std::abs(power); ++i) p = step(map, p, power > 0 ? 1 : -1);
  return p;
}

// Largest sub-box of `outer` in which no curve ends strictly inside.
Box end_free_window(const Box& outer, std::initializer_list<const Polyline*> curves) {
  double margin = 0.0;
  for (const Polyline* c : curves)
    for (Point end : {c->front(), c->back()}) margin = std::max(margin, outer.depth(end));
  const Box w = outer.shrunk(margin);
  if (!(w.width() > 0.0) || !(w.height() > 0.0))
    throw Error(ErrorKind::Inconclusive, "window too small to hold the curves with their ends outside");
  return w;
}

Point most_interior_vertex(const Polyline& curve, const Box& window) {
  double best = -kInf;
  Point out = curve.front();
  for (Point v : curve.vertices()) {
    const double d = window.depth(v);
    if (d > best) {
      best = d;
      out = v;
    }
  }
  if (!(best > 0.0)) throw Error(ErrorKind::Inconclusive, "curve has no vertex inside the window");
  return out;
}

// Point on the polyline nearest the leaf through `a`, by minimizing the
// surrogate along the polyline and then in local coordinates.
std::optional<Point> leaf_meets(const LyapunovMetric& metric, const PlaneMap& map, const Polyline& curve, Point a,
                                int direction, int n, bool reject_endpoints) {
  const double length = curve.length();
  const auto along = [&](double s) { return surrogate(metric, map, a, curve.point_at(s), direction, n); };
  const int samples = 256;
  const double ds = length / samples;
  int best_i = 0;
  double best = kInf;
  for (int i = 0; i <= samples; ++i) {
    const double r = along(i * ds);
    if (r < best) {
      best = r;
      best_i = i;
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  const double s = detail::golden_min(along, std::max(0.0, (best_i - 1) * ds), std::min(length, (best_i + 1) * ds), 90);
  if (reject_endpoints && (s <= 1e-9 * length || s >= length * (1.0 - 1e-9))) return std::nullopt;

  // Local refinement so that the result keeps full relative precision.
  Point c = curve.point_at(s);
  const std::size_t seg = std::min(curve.nearest_vertex(c), curve.segment_count() - 1);
  const auto& v = curve.vertices();
  Point e = v[seg + 1] - v[seg];
  e = (1.0 / norm(e)) * e;
  double w = 4.0 * ds * std::pow(detail::kGolden, 90);
  for (int round = 0; round < 4; ++round) {
    const double delta =
        detail::golden_min([&](double t) { return surrogate(metric, map, a, c + t * e, direction, n); }, -w, w, 90);
    c = c + delta * e;
    if (std::abs(delta) > 0.9 * w) w *= 4.0;
    else w = std::max(std::abs(delta) * 4.0, w * std::pow(detail::kGolden, 60));
  }
  return c;
}

}  // namespace

const char* to_string(Separator s) {
  switch (s) {
    case Separator::Preimage: return "preimage";
    case Separator::Leaf: return "leaf";
    case Separator::Image: return "image";
    case Separator::None: return "none";
  }
  return "?";
}

double leaf_invariance_check(const LeafCurve& leaf, const PlaneMap& map, int power) {
  if (power != 1 && power != 2) throw Error(ErrorKind::InvalidArgument, "power must be 1 or 2");
  std::vector<Point> image;
  image.reserve(leaf.polyline.size());
  for (Point v : leaf.polyline.vertices()) {
    try {
      const Point w = pow_map(map, v, power);
      if (leaf.window.contains(w)) image.push_back(w);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
    }
  }
  // Image points beyond an end that stopped short of the window have nothing
  // to be compared against.
  const double total = leaf.polyline.length();
  const double slack = 1e-9 * std::max(1.0, total);
  double worst = 0.0;
  for (Point w : image) {
    const auto pr = leaf.polyline.project(w);
    if (!leaf.truncation.front_at_window && pr.arclength <= slack) continue;
    if (!leaf.truncation.back_at_window && pr.arclength >= total - slack) continue;
    worst = std::max(worst, pr.distance);
  }
  return worst;
}

SeparationReport separation_trichotomy(const LeafCurve& leaf, const PlaneMap& map) {
  if (leaf_invariance_check(leaf, map, 1) <= kInvarianceTolerance)
    throw Error(ErrorKind::InvariantLeaf, "the leaf is invariant under the map");

  const Polyline pre = map_polyline(leaf.polyline, [&](Point p) { return step(map, p, -1); });
  const Polyline img = map_polyline(leaf.polyline, [&](Point p) { return step(map, p, 1); });
  const std::array<const Polyline*, 3> curves{&pre, &leaf.polyline, &img};

  SeparationReport report;
  report.window = end_free_window(leaf.window, {&pre, &leaf.polyline, &img});
  SeparationOptions opts;
  opts.window = report.window;

  int separators = 0;
  for (int i = 0; i < 3; ++i) {
    const Polyline& a = *curves[static_cast<std::size_t>((i + 1) % 3)];
    const Polyline& b = *curves[static_cast<std::size_t>((i + 2) % 3)];
    SeparationEvidence ev;
    ev.candidate = static_cast<Separator>(i);
    ev.p = most_interior_vertex(a, report.window);
    ev.q = most_interior_vertex(b, report.window);
    ev.separated = separates(*curves[static_cast<std::size_t>(i)], ev.p, ev.q, opts);
    if (ev.separated) {
      ++separators;
      report.separator = ev.candidate;
    }
    report.evidence.push_back(ev);
  }
  if (separators > 1) throw Error(ErrorKind::Inconclusive, "more than one curve separates the other two");
  return report;
}

Region FundamentalDomain::classify(Point p) const {
  MembershipOptions opts;
  opts.window = window;
  return region_between_membership(lower.polyline, upper, p, opts);
}

FundamentalDomain build_fundamental_domain(const LeafCurve& leaf, const PlaneMap& map) {
  const SeparationReport sep = separation_trichotomy(leaf, map);
  if (sep.separator != Separator::Leaf)
    throw Error(ErrorKind::InvalidArgument,
                std::string("leaf does not separate its image from its preimage (separator: ") +
                    to_string(sep.separator) + ")");
  Polyline upper = map_polyline(leaf.polyline, [&](Point p) { return step(map, p, 1); });
  try {
    if (crossing_points(leaf.polyline, upper).count != 0)
      throw Error(ErrorKind::BoundariesCross, "leaf and its image intersect");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateOverlap || e.kind() == ErrorKind::InvalidArgument)
      throw Error(ErrorKind::BoundariesCross, e.what());
    throw;
  }
  const Box window = end_free_window(leaf.window, {&leaf.polyline, &upper});
  return FundamentalDomain{leaf, std::move(upper), window};
}

namespace {

// Shared orbit search; half_open drops points on the upper boundary so that
// every orbit has a single representative.
std::optional<std::pair<int, Point>> orbit_search(const FundamentalDomain& domain, const PlaneMap& map, Point p,
                                                  int budget, bool half_open) {
  if (budget < 1) throw Error(ErrorKind::InvalidArgument, "orbit budget must be at least 1");
  const auto hit = [&](Point q) {
    // curve ends sit on the edge, where parity is unreliable
    if (!(domain.window.depth(q) > 0)) return false;
    try {
      const Region r = domain.classify(q);
      if (r == Region::Outside) return false;
      if (r == Region::Boundary && half_open &&
          domain.upper.distance_to(q) < domain.lower.polyline.distance_to(q))
        return false;
      return true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Inconclusive) return false;
      throw;
    }
  };
  if (hit(p)) return std::pair{0, p};
  Point ahead = p;   // f^m(p), i.e. n = -m
  Point behind = p;  // f^{-m}(p), i.e. n = +m
  bool ahead_ok = true, behind_ok = true;
  for (int m = 1; m <= budget; ++m) {
    if (ahead_ok) {
      try {
        ahead = step(map, ahead, 1);
        if (hit(ahead)) return std::pair{-m, ahead};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        ahead_ok = false;
      }
    }
    if (behind_ok) {
      try {
        behind = step(map, behind, -1);
        if (hit(behind)) return std::pair{m, behind};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        behind_ok = false;
      }
    }
    if (!ahead_ok && !behind_ok) break;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> orbit_union_membership(const FundamentalDomain& domain, const PlaneMap& map, Point p,
                                          int budget) {
  if (auto r = orbit_search(domain, map, p, budget, false)) return r->first;
  return std::nullopt;
}

LimitLeafResult boundary_limit_leaf(const LeafCurve& leaf, const LyapunovMetric& metric, const PlaneMap& map,
                                    const Polyline& transversal, const LimitLeafOptions& options) {
  if (options.budget < 2 || options.budget % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "iterate budget must be even and at least 2");
  if (options.direction != 1 && options.direction != -1)
    throw Error(ErrorKind::InvalidArgument, "direction must be +1 or -1");

  const CrossingReport first = crossing_points(transversal, leaf.polyline);
  if (first.count == 0) throw Error(ErrorKind::NotConverging, "transversal does not cross the leaf");

  const int sdir = iteration_direction(leaf.stability);
  const int n_sur = options.surrogate_iterations;
  LimitLeafResult out{leaf, {first.points.front()}, first.points.front(), 0};

  // Tangent of the transversal at the first crossing, for monotonicity.
  const auto& tv = transversal.vertices();
  const std::size_t seg = std::min(transversal.nearest_vertex(first.points.front()), transversal.segment_count() - 1);
  const Point tangent = tv[seg + 1] - tv[seg];

  // Crossings closer than this are indistinguishable once the map and metric
  // round in absolute terms (e.g. through a conjugacy).
  double span = 0.0;
  for (std::size_t i = 0; i + 1 < tv.size(); ++i) span += distance(tv[i], tv[i + 1]);
  const double floor = kStallFloor * std::max(1.0, span);

  int trend = 0;
  bool converged = false;
  for (int n = 1; n <= options.budget; ++n) {
    const Point prev = out.crossings.back();
    Point a;
    try {
      a = step(map, prev, options.direction);  // on f^{+-n}(leaf)
    } catch (const Error&) {
      throw Error(ErrorKind::NotConverging, "iterate left the representable range");
    }

    // Try a local bracket around the previous crossing before a full scan.
    std::optional<Point> xn;
    if (n >= 2) {
      const Point d = out.crossings[out.crossings.size() - 1] - out.crossings[out.crossings.size() - 2];
      const double w = std::max(4.0 * norm(d), 1e-300);
      const Point e = (1.0 / norm(tangent)) * tangent;
      const auto local = [&](double t) { return surrogate(metric, map, a, prev + t * e, sdir, n_sur); };
      const double t = detail::golden_min(local, -w, w, 120);
      if (std::abs(t) < 0.95 * w) xn = prev + t * e;
    }
    if (!xn) xn = leaf_meets(metric, map, transversal, a, sdir, n_sur, true);
    if (!xn) throw Error(ErrorKind::NotConverging, "an image of the leaf no longer meets the transversal");
    out.crossings.push_back(*xn);
    out.iterations = n;

    if (n % 2 == 0) {
      const Point older = out.crossings[static_cast<std::size_t>(n - 2)];
      const Point step_vec = *xn - older;
      const double along = dot(step_vec, tangent);
      if (norm(step_vec) <= std::max(4e-16 * norm(*xn), floor)) {
        converged = true;
        break;
      }
      const int sign = along > 0.0 ? 1 : (along < 0.0 ? -1 : 0);
      if (sign != 0) {
        if (trend != 0 && sign != trend)
          throw Error(ErrorKind::NotConverging, "even crossings are not monotone along the transversal");
        trend = sign;
      }
    }
  }
  if (!converged) throw Error(ErrorKind::NotConverging, "even crossings did not settle within the budget");

  out.limit = out.crossings.back();
  bool moved = false;
  for (Point c : out.crossings) moved = moved || distance(c, out.crossings.front()) > 1e-12;
  if (!moved) return out;

  if (!leaf.window.contains(out.limit)) throw Error(ErrorKind::NotConverging, "limit point outside the window");
  TraceOptions trace;
  trace.k = leaf.truncation.k;
  trace.n_max = leaf.truncation.n_max;
  trace.step = leaf.truncation.step;
  trace.arclength_budget = leaf.truncation.arclength_budget;
  trace.window = leaf.window;
  out.leaf = trace_leaf(metric, map, out.limit, leaf.stability, trace);
  return out;
}

ConjugacyChart::ConjugacyChart(FundamentalDomain domain, PlaneMap map, LyapunovMetric metric, int orbit_budget,
                               int surrogate_iterations)
    : domain_(std::move(domain)),
      map_(std::move(map)),
      metric_(std::move(metric)),
      orbit_budget_(orbit_budget),
      surrogate_iterations_(surrogate_iterations),
      transverse_(domain_.lower.stability == Stability::Stable ? Stability::Unstable : Stability::Stable) {}

Point ConjugacyChart::crossing(const Polyline& boundary, Point p) const {
  const auto c = leaf_meets(metric_, map_, boundary, p, iteration_direction(transverse_), surrogate_iterations_, false);
  if (!c) throw Error(ErrorKind::ChartDegenerate, "transverse leaf does not meet the domain boundary");
  return *c;
}

Point ConjugacyChart::local(Point p) const {
  const Point low = crossing(domain_.lower.polyline, p);
  const Point up = crossing(domain_.upper, p);
  const double span = metric_(low, up);
  if (!(span >= 1e-9)) throw Error(ErrorKind::ChartDegenerate, "boundary crossings coincide");
  const double tau = metric_(low, p) / span;
  const Polyline& lower = domain_.lower.polyline;
  const double sigma = lower.project(low).arclength - lower.arclength_at(domain_.lower.base_index);
  return {tau, sigma};
}

std::optional<Point> ConjugacyChart::operator()(Point p) const {
  const auto found = orbit_search(domain_, map_, p, orbit_budget_, true);
  if (!found) return std::nullopt;
  const Point c = local(found->second);
  return Point{found->first + c.x1, c.x2};
}

ConjugacyChart build_conjugacy(const FundamentalDomain& domain, const PlaneMap& map, const LyapunovMetric& metric,
                               int orbit_budget) {
  ConjugacyChart chart(domain, map, metric, orbit_budget);
  // Probe the chart at the base point so degenerate setups fail early.
  chart.local(domain.lower.base);
  return chart;
}

ResidualStats conjugacy_residual(const ConjugacyChart& chart, const PlaneMap& map, const std::vector<Point>& samples) {
  ResidualStats stats;
  double total = 0.0;
  for (Point p : samples) {
    const auto hp = chart(p);
    const auto hfp = hp ? chart(map.forward(p)) : std::nullopt;
    if (!hp || !hfp) {
      stats.not_covered.push_back(p);
      continue;
    }
    const double r = distance(*hfp, Point{hp->x1 + 1.0, hp->x2});
    stats.max = std::max(stats.max, r);
    total += r;
    ++stats.evaluated;
  }
  if (stats.evaluated > 0) stats.mean = total / static_cast<double>(stats.evaluated);
  return stats;
}

bool chart_injective(const ConjugacyChart& chart, const std::vector<Point>& samples, double tolerance) {
  std::vector<std::pair<Point, Point>> images;
  for (Point p : samples)
    if (auto h = chart(p)) images.emplace_back(*h, p);
  std::sort(images.begin(), images.end(), [](const auto& a, const auto& b) { return a.first.x1 < b.first.x1; });
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size() && images[j].first.x1 - images[i].first.x1 <= tolerance; ++j) {
      if (distance(images[i].first, images[j].first) <= tolerance && !(images[i].second == images[j].second))
        return false;
    }
  }
  return true;
}

namespace {

std::optional<LimitLeafResult> invariant_leaf(const LyapunovMetric& metric, const PlaneMap& map, Point seed,
                                              Stability stability, const Polyline& transversal,
                                              const TraceOptions& trace, int budget, std::string& detail) {
  LeafCurve leaf = trace_leaf(metric, map, seed, stability, trace);
  for (int direction : {-1, 1}) {
    try {
      LimitLeafOptions opts;
      opts.direction = direction;
      opts.budget = budget;
      return boundary_limit_leaf(leaf, metric, map, transversal, opts);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotConverging) throw;
      detail += std::string(to_string(stability)) + (direction < 0 ? " backward: " : " forward: ") + e.what() + "; ";
    }
  }
  return std::nullopt;
}

}  // namespace

FixedPointDetection fixed_point_detector(const LyapunovMetric& metric, const PlaneMap& map,
                                         const DetectorInputs& inputs) {
  FixedPointDetection out;
  const auto s = invariant_leaf(metric, map, inputs.stable_seed, Stability::Stable, inputs.stable_transversal,
                                inputs.trace, inputs.budget, out.detail);
  const auto u = invariant_leaf(metric, map, inputs.unstable_seed, Stability::Unstable, inputs.unstable_transversal,
                                inputs.trace, inputs.budget, out.detail);
  if (!s || !u) return out;
  const CrossingReport cross = leaf_pair_intersection(s->leaf, u->leaf);
  if (cross.count == 0) {
    out.detail += "invariant leaves do not cross in the window";
    return out;
  }
  const Point p = cross.points.front();
  out.crossing = p;
  out.displacement = distance(pow_map(map, p, 2), p);
  out.fired = out.displacement <= 1e-6;
  out.detail += out.fired ? "f^2-invariant leaves cross at a fixed point" : "crossing is moved by f^2";
  return out;
}

PipelineResult translation_pipeline(const LyapunovMetric& metric, const PlaneMap& map, const PipelineOptions& options) {
  PipelineResult out;
  const LeafCurve leaf = trace_leaf(metric, map, options.seed, Stability::Stable, options.trace);
  out.stable_separation = separation_trichotomy(leaf, map);
  FundamentalDomain stable_domain = build_fundamental_domain(leaf, map);

  const std::vector<Point> nodes = grid_points(options.coverage_box, options.coverage_nodes);
  const auto uncovered = [&](const FundamentalDomain& d, bool first_only) {
    std::vector<Point> missing;
    for (Point p : nodes) {
      if (!orbit_union_membership(d, map, p, options.orbit_budget)) {
        missing.push_back(p);
        if (first_only) break;
      }
    }
    return missing;
  };
  out.stable_not_covered = uncovered(stable_domain, true);
  if (out.stable_not_covered.empty()) {
    out.domain = std::move(stable_domain);
    out.chart = build_conjugacy(*out.domain, map, metric, options.orbit_budget);
    return out;
  }

  out.switched = true;
  const Polyline transversal = options.transversal.value_or(
      Polyline({options.seed - Point{0.0, 2.0}, options.seed + Point{0.0, 2.0}}));
  std::optional<LimitLeafResult> limit;
  for (int direction : {-1, 1}) {
    try {
      LimitLeafOptions opts;
      opts.direction = direction;
      opts.budget = options.limit_budget;
      limit = boundary_limit_leaf(leaf, metric, map, transversal, opts);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotConverging || direction == 1) throw;
    }
  }
  out.limit = std::move(limit);
  out.limit_invariance_1 = leaf_invariance_check(out.limit->leaf, map, 1);
  out.limit_invariance_2 = leaf_invariance_check(out.limit->leaf, map, 2);

  const LeafCurve unstable = trace_leaf(metric, map, out.limit->limit, Stability::Unstable, options.trace);
  out.domain = build_fundamental_domain(unstable, map);
  out.final_not_covered = uncovered(*out.domain, false);
  out.chart = build_conjugacy(*out.domain, map, metric, options.orbit_budget);
  return out;
}

}  // namespace planedyn
