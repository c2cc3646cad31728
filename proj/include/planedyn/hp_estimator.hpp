#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "planedyn/geometry.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"

namespace planedyn {

/// |V(x,y) - V(x,z)| / W(x,y). Returns 0 for y == z; raises NonPositiveW
/// when W(x,y) <= 1e-12.
double hp_ratio(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y, Point z);

inline constexpr double kHPThreshold = 0.05;

enum class RadiusNotion { Euclidean, MetricU };
const char* to_string(RadiusNotion n);

struct HPScanConfig {
  std::vector<Point> sample;  // the compact set C
  std::vector<double> radii;  // strictly increasing
  RadiusNotion notion = RadiusNotion::MetricU;
  int directions = 72;
  /// Directions are angle_start + i * angle_span / directions; a span of 0
  /// places every direction on the same ray.
  double angle_start = 0.0;
  double angle_span = 6.283185307179586;
  /// Ordered (y, z) pairs per x; 0 means all pairs.
  std::size_t pair_budget = 0;
  std::uint64_t seed = 1;
};

/// 5x5 grid on the unit square.
std::vector<Point> unit_square_sample(int nodes_per_axis = 5);

struct HPRadiusResult {
  double radius = 0.0;
  double sup_ratio = 0.0;
  Point x, y, z;  // argmax witnesses
  long exclusions = 0;  // NonPositiveW samples skipped
  int centers = 0;      // directions where a center point was found
};

enum class HPVerdict { Decaying, NotDecaying };
const char* to_string(HPVerdict v);

struct HPScanReport {
  std::vector<HPRadiusResult> rows;
  HPVerdict verdict = HPVerdict::NotDecaying;
  bool strictly_decreasing = false;
};

/// Decaying iff the sup ratios are non-increasing across radii and the last
/// one is below kHPThreshold.
HPScanReport hp_scan(const LyapunovMetric& metric, const PlaneMap& map, const HPScanConfig& config);

}  // namespace planedyn
