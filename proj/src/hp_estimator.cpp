#include "planedyn/hp_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "planedyn/differences.hpp"
#include "planedyn/error.hpp"

namespace planedyn {

namespace {

constexpr double kMinW = 1e-12;

}  // namespace

double hp_ratio(const LyapunovMetric& metric, const PlaneMap& map, Point x, Point y, Point z) {
  if (y == z) return 0.0;
  const DifferenceValues dy = differences(metric, map, x, y);
  if (!(dy.w > kMinW)) throw Error(ErrorKind::NonPositiveW, "W(x, y) is not positive");
  const double vz = first_difference(metric, map, x, z);
  return std::abs(dy.v - vz) / dy.w;
}

const char* to_string(RadiusNotion n) { return n == RadiusNotion::Euclidean ? "Euclidean" : "MetricU"; }
const char* to_string(HPVerdict v) { return v == HPVerdict::Decaying ? "Decaying" : "NotDecaying"; }

std::vector<Point> unit_square_sample(int nodes_per_axis) {
  return grid_points(Box{{0.0, 0.0}, {1.0, 1.0}}, nodes_per_axis);
}

HPScanReport hp_scan(const LyapunovMetric& metric, const PlaneMap& map, const HPScanConfig& config) {
  if (config.sample.empty()) throw Error(ErrorKind::InvalidArgument, "HP sample set is empty");
  if (config.radii.empty()) throw Error(ErrorKind::InvalidArgument, "no radii");
  for (std::size_t i = 1; i < config.radii.size(); ++i)
    if (!(config.radii[i] > config.radii[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "radii must be strictly increasing");
  if (config.directions < 1) throw Error(ErrorKind::InvalidArgument, "need at least one direction");

  const auto& c = config.sample;
  const std::size_t m = c.size();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  const Point origin{0.0, 0.0};

  HPScanReport report;
  for (double radius : config.radii) {
    HPRadiusResult row;
    row.radius = radius;
    for (int d = 0; d < config.directions; ++d) {
      const double theta = config.angle_start + config.angle_span * d / config.directions;
      std::optional<Point> x;
      if (config.notion == RadiusNotion::Euclidean) {
        x = Point{radius * std::cos(theta), radius * std::sin(theta)};
      } else {
        RayOptions ray;
        ray.r_max = 1e12;
        x = sphere_point(metric, origin, theta, radius, ray);
      }
      if (!x) continue;
      ++row.centers;

      // V(x, .) and W(x, .) once per sample point.
      std::vector<double> v(m), w(m);
      std::vector<char> usable(m, 1);
      for (std::size_t i = 0; i < m; ++i) {
        const DifferenceValues dv = differences(metric, map, *x, c[i]);
        v[i] = dv.v;
        w[i] = dv.w;
      }
      const auto consider = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        if (!(w[i] > kMinW)) {
          if (usable[i]) ++row.exclusions;
          usable[i] = 0;
          return;
        }
        const double r = std::abs(v[i] - v[j]) / w[i];
        if (r > row.sup_ratio) {
          row.sup_ratio = r;
          row.x = *x;
          row.y = c[i];
          row.z = c[j];
        }
      };
      if (config.pair_budget == 0) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) consider(i, j);
      } else {
        for (std::size_t s = 0; s < config.pair_budget; ++s) {
          const std::size_t i = pick(rng);
          const std::size_t j = pick(rng);
          consider(i, j);
        }
      }
    }
    report.rows.push_back(row);
  }

  bool non_increasing = true;
  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].sup_ratio > report.rows[i - 1].sup_ratio) non_increasing = false;
    if (!(report.rows[i].sup_ratio < report.rows[i - 1].sup_ratio)) report.strictly_decreasing = false;
  }
  const bool any_centers = std::all_of(report.rows.begin(), report.rows.end(),
                                       [](const HPRadiusResult& r) { return r.centers > 0; });
  report.verdict = non_increasing && any_centers && report.rows.back().sup_ratio < kHPThreshold
                       ? HPVerdict::Decaying
                       : HPVerdict::NotDecaying;
  return report;
}

}  // namespace planedyn
