#pragma once

#include <optional>

#include "planedyn/geometry.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"

namespace planedyn {

struct DifferenceValues {
  double v = 0.0;  // U(fx, fy) - U(x, y)
  double w = 0.0;  // V(fx, fy) - V(x, y)
};

/// V and W without any sign check.
DifferenceValues differences(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y);

double first_difference(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y);

/// W(x, y); raises NonPositiveW when x != y and W <= 0, which means the
/// metric is not a Lyapunov function for this map.
double second_difference(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y);

struct RayOptions {
  double r_min = 1e-8;
  double r_max = 1e6;
  double tolerance = 1e-10;
  /// A located point is rejected when |U - k| exceeds this.
  double acceptance = 1e-6;
};

/// Point x + r e(theta) with U(x, .) = k, by bisection in r. Empty when the
/// bracket [r_min, r_max] does not straddle k along this ray.
std::optional<Point> sphere_point(const LyapunovMetric& metric, Point x, double theta, double k,
                                  const RayOptions& options = {});

struct SignProbeResult {
  Point x;
  double k = 0.0;
  Point y_plus;
  double v_plus = 0.0;
  Point z_minus;
  double v_minus = 0.0;
  int directions_on_sphere = 0;
};

struct ProbeOptions {
  int directions = 720;
  RayOptions ray;
};

/// Finds points on the U-sphere of radius k about x where the first
/// difference is positive (y_plus, the maximizer) and negative (z_minus,
/// the minimizer). Directions are first searched for a single crossing each;
/// if a sign is still missing, every crossing along each ray is scanned.
/// Raises ProbeFailed when one sign never occurs.
SignProbeResult sphere_sign_probe(const LyapunovMetric& metric, const PlaneMap& map, Point x, double k,
                                  const ProbeOptions& options = {});

struct ExpansivenessCertificate {
  int n = 0;
  double separation = 0.0;  // U(f^n x, f^n y)
  /// U(f^j x, f^j y) >= U + j V along the searched branch (relative slack 1e-6).
  bool growth_bound_holds = true;
  int growth_checks = 0;
};

/// Least |n| (forward when V(x,y) >= 0, backward otherwise) such that
/// U(f^n x, f^n y) > k. Raises BudgetExceeded after `budget` iterations.
ExpansivenessCertificate expansiveness_certificate(const LyapunovMetric& metric, const PlaneMap& map, Point x,
                                                   Point y, double k, int budget = kDefaultIterationBudget);

}  // namespace planedyn
