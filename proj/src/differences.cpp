#include "planedyn/differences.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "golden.hpp"
#include "planedyn/error.hpp"

namespace planedyn {

namespace {

double u_or_inf(const LyapunovMetric& metric, Point p, Point q) {
  try {
    return metric(p, q);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Overflow) return std::numeric_limits<double>::infinity();
    throw;
  }
}

// Every crossing of U(x, .) = k along the ray, located by bisection in each
// sign change of a log-spaced scan. Catches spheres that are not star-shaped
// about x, where the single-bracket search returns only one branch.
std::vector<Point> ray_crossings(const LyapunovMetric& metric, Point x, double theta, double k,
                                 const RayOptions& options) {
  constexpr int kPerDecade = 24;
  const Point e{std::cos(theta), std::sin(theta)};
  const auto gap = [&](double r) { return u_or_inf(metric, x, x + r * e) - k; };
  const int n = std::max(1, static_cast<int>(std::ceil(kPerDecade * std::log10(options.r_max / options.r_min))));
  const double ratio = std::pow(options.r_max / options.r_min, 1.0 / n);

  std::vector<Point> out;
  double a = options.r_min;
  double ga = gap(a);
  for (int i = 1; i <= n; ++i) {
    const double b = i == n ? options.r_max : options.r_min * std::pow(ratio, i);
    const double gb = gap(b);
    if (std::isinf(gb) && std::isinf(ga)) break;  // past overflow; nothing further is representable
    if ((ga < 0.0) != (gb < 0.0) && std::isfinite(ga)) {
      double lo = a, hi = b, glo = ga;
      double best_r = std::abs(ga) < std::abs(gb) ? a : b;
      double best_gap = std::min(std::abs(ga), std::abs(gb));
      for (int it = 0; it < 200 && best_gap > options.tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g = gap(mid);
        if (std::abs(g) < best_gap) {
          best_gap = std::abs(g);
          best_r = mid;
        }
        if ((g < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = g;
        } else {
          hi = mid;
        }
      }
      if (best_gap <= options.acceptance) out.push_back(x + best_r * e);
    }
    a = b;
    ga = gb;
  }
  return out;
}

}  // namespace

DifferenceValues differences(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y) {
  const Point fx = map.forward(x), fy = map.forward(y);
  const Point ffx = map.forward(fx), ffy = map.forward(fy);
  check_overflow(ffx);
  check_overflow(ffy);
  const double u0 = metric(x, y);
  const double u1 = metric(fx, fy);
  const double u2 = metric(ffx, ffy);
  return {u1 - u0, (u2 - u1) - (u1 - u0)};
}

double first_difference(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y) {
  const Point fx = step(map, x, 1);
  const Point fy = step(map, y, 1);
  return metric(fx, fy) - metric(x, y);
}

double second_difference(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y) {
  const double w = differences(metric, map, x, y).w;
  if (!(x == y) && !(w > 0.0))
    throw Error(ErrorKind::NonPositiveW, "second difference is not positive for a distinct pair");
  return w;
}

std::optional<Point> sphere_point(const LyapunovMetric& metric, Point x, double theta, double k,
                                  const RayOptions& options) {
  const Point e{std::cos(theta), std::sin(theta)};
  const auto gap = [&](double r) { return u_or_inf(metric, x, x + r * e) - k; };

  double lo = options.r_min;
  double hi = options.r_max;
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (g_lo > 0.0 || !(g_hi >= 0.0)) return std::nullopt;
  if (std::abs(g_lo) <= options.tolerance) return x + lo * e;

  double best_r = hi;
  double best_gap = g_hi;
  for (int it = 0; it < 400; ++it) {
    // Geometric midpoints while the bracket spans decades, then arithmetic.
    const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = gap(mid);
    if (std::abs(g) < std::abs(best_gap)) {
      best_gap = g;
      best_r = mid;
    }
    if (std::abs(g) <= options.tolerance) break;
    if (g < 0.0) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  if (!(std::abs(best_gap) <= options.acceptance)) return std::nullopt;
  return x + best_r * e;
}

SignProbeResult sphere_sign_probe(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k,
                                  const ProbeOptions& options) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "sphere radius k must be positive");
  if (options.directions < 4) throw Error(ErrorKind::InvalidArgument, "need at least four probe directions");

  SignProbeResult result;
  result.x = x;
  result.k = k;
  const int m = options.directions;
  const double dtheta = 2.0 * std::numbers::pi / m;

  struct Sample {
    double theta;
    Point p;
    double v;
  };
  std::optional<Sample> max_sample, min_sample;
  const auto sample_at = [&](double theta) -> std::optional<Sample> {
    const auto p = sphere_point(metric, x, theta, k, options.ray);
    if (!p) return std::nullopt;
    try {
      return Sample{theta, *p, first_difference(metric, map, x, *p)};
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Overflow) return std::nullopt;
      throw;
    }
  };
  const auto record = [&](const Sample& s) {
    if (!max_sample || s.v > max_sample->v) max_sample = s;
    if (!min_sample || s.v < min_sample->v) min_sample = s;
  };

  for (int i = 0; i < m; ++i) {
    if (auto s = sample_at(i * dtheta)) {
      ++result.directions_on_sphere;
      record(*s);
    }
  }
  if (result.directions_on_sphere == 0)
    throw Error(ErrorKind::ProbeFailed, "no direction reaches the U-sphere of the requested radius");

  // Refine around the extremal direction when one sign is still missing.
  const auto refine = [&](bool want_positive) {
    const Sample& seed = want_positive ? *max_sample : *min_sample;
    const auto score = [&](double theta) {
      auto s = sample_at(theta);
      if (!s) return std::numeric_limits<double>::infinity();
      record(*s);
      return want_positive ? -s->v : s->v;
    };
    detail::golden_min(score, seed.theta - dtheta, seed.theta + dtheta, 60);
  };
  if (!(max_sample->v > 0.0)) refine(true);
  if (!(min_sample->v < 0.0)) refine(false);

  // Still one-signed: the sphere may fold back across rays, and the missing
  // sign may sit on a needle thinner than the ray spacing.
  const auto one_signed = [&] { return !(max_sample->v > 0.0) || !(min_sample->v < 0.0); };
  for (int refine_level = 1; refine_level <= 64 && one_signed(); refine_level *= 4) {
    const int rays = m * refine_level;
    const double dt = 2.0 * std::numbers::pi / rays;
    for (int i = 0; i < rays && one_signed(); ++i) {
      if (refine_level > 1 && i % 4 == 0) continue;  // scanned at the previous level
      for (Point p : ray_crossings(metric, x, i * dt, k, options.ray)) {
        try {
          record(Sample{i * dt, p, first_difference(metric, map, x, p)});
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Overflow) throw;
        }
      }
    }
  }

  if (!(max_sample->v > 0.0) || !(min_sample->v < 0.0))
    throw Error(ErrorKind::ProbeFailed, "first difference does not take both signs on the U-sphere");
  result.y_plus = max_sample->p;
  result.v_plus = max_sample->v;
  result.z_minus = min_sample->p;
  result.v_minus = min_sample->v;
  return result;
}

ExpansivenessCertificate expansiveness_certificate(const LyapunovMetric& metric, const PlaneMap& map, Point x,
                                                   Point y, double k, int budget) {
  if (x == y) throw Error(ErrorKind::InvalidArgument, "expansiveness needs distinct points");
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold k must be positive");

  ExpansivenessCertificate cert;
  const double u0 = metric(x, y);
  cert.separation = u0;
  if (u0 > k) return cert;

  const double v0 = first_difference(metric, map, x, y);
  const int direction = v0 >= 0.0 ? 1 : -1;

  Point a = x, b = y;
  // Growth bound reference: along the chosen branch the one-step difference
  // taken in that direction is nonnegative; when it vanishes the bound is
  // anchored one step later.
  double anchor_u = u0;
  double anchor_v = direction > 0 ? v0 : std::numeric_limits<double>::quiet_NaN();
  int anchor_n = 0;

  for (int n = 1; n <= budget; ++n) {
    try {
      a = step(map, a, direction);
      b = step(map, b, direction);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
      cert.n = direction * n;
      cert.separation = std::numeric_limits<double>::infinity();
      return cert;
    }
    const double u = u_or_inf(metric, a, b);
    if (n == 1) {
      if (std::isnan(anchor_v)) anchor_v = u - u0;
      if (anchor_v == 0.0) {
        anchor_u = u;
        anchor_n = 1;
        const Point a2 = step(map, a, direction), b2 = step(map, b, direction);
        anchor_v = u_or_inf(metric, a2, b2) - u;
      }
    }
    if (anchor_v > 0.0 && n > anchor_n && std::isfinite(u)) {
      const double bound = anchor_u + (n - anchor_n) * anchor_v;
      ++cert.growth_checks;
      if (u < bound - 1e-6 * std::max(1.0, std::abs(bound))) cert.growth_bound_holds = false;
    }
    if (u > k) {
      cert.n = direction * n;
      cert.separation = u;
      return cert;
    }
  }
  throw Error(ErrorKind::BudgetExceeded, "orbits did not separate within the iteration budget");
}

}  // namespace planedyn
