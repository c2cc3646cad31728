#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "planedyn/differences.hpp"
#include "planedyn/error.hpp"
#include "planedyn/hp_estimator.hpp"

using namespace planedyn;

namespace {
const auto T = PlaneMap::translation({1, 0});
const auto C = LyapunovMetric::exact_form(2.0);
const auto L = PlaneMap::linear_hyperbolic(2.0);
const auto D = LyapunovMetric::euclidean_split(2.0);

double v_split(oracle::P x, oracle::P y) {
  return oracle::u_split(oracle::hyperbolic(2, x, 1), oracle::hyperbolic(2, y, 1)) - oracle::u_split(x, y);
}
double w_split(oracle::P x, oracle::P y) {
  return v_split(oracle::hyperbolic(2, x, 1), oracle::hyperbolic(2, y, 1)) - v_split(x, y);
}
}  // namespace

TEST_CASE("ratio at far points") {
  const double r5 = hp_ratio(C, T, {-5, 0}, {0, 0}, {0, 1});
  const double num5 = std::fabs(oracle::v_shift(2, {-5, 0}, {0, 0}) - oracle::v_shift(2, {-5, 0}, {0, 1}));
  CHECK(num5 == doctest::Approx(1.0));
  CHECK(oracle::w_shift(2, {-5, 0}, {0, 0}) == doctest::Approx(0.25 * 31 / std::log(2.0)));
  CHECK(r5 == doctest::Approx(num5 / oracle::w_shift(2, {-5, 0}, {0, 0})));
  CHECK(r5 == doctest::Approx(0.0894).epsilon(1e-3));
  const double r10 = hp_ratio(C, T, {-10, 0}, {0, 0}, {0, 1});
  CHECK(r10 == doctest::Approx(0.00271).epsilon(1e-2));
  CHECK(hp_ratio(C, T, {-10, 0}, {0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK_THROWS_AS(hp_ratio(C, PlaneMap::identity(), {-10, 0}, {0, 0}, {0, 1}), Error);
}

TEST_CASE("numerator bound on compact samples") {
  const auto sample = unit_square_sample();
  for (Point x : {Point{-7, 3}, Point{12, -40}, Point{-2, 0.1}}) {
    for (Point y : sample)
      for (Point z : sample) {
        const double lhs = std::fabs(first_difference(C, T, x, y) - first_difference(C, T, x, z));
        const Components c = C.components(z, y);
        CHECK(lhs <= c.du + 0.5 * c.ds + 1e-9);
        const double lhs_d = std::fabs(first_difference(D, L, x, y) - first_difference(D, L, x, z));
        const Components d = D.components(z, y);
        CHECK(lhs_d <= d.du + 0.5 * d.ds + 1e-9);
        // numerator symmetric in y and z
        CHECK(std::fabs(first_difference(C, T, x, z) - first_difference(C, T, x, y)) == lhs);
      }
  }
}

TEST_CASE("Euclidean scan of the split metric matches brute force") {
  HPScanConfig cfg;
  cfg.sample = unit_square_sample();
  cfg.radii = {10, 20, 40, 80};
  cfg.notion = RadiusNotion::Euclidean;
  const auto rep = hp_scan(D, L, cfg);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    double sup = 0;
    for (int d = 0; d < cfg.directions; ++d) {
      const double th = cfg.angle_span * d / cfg.directions;
      const oracle::P x{row.radius * std::cos(th), row.radius * std::sin(th)};
      for (Point y : cfg.sample)
        for (Point z : cfg.sample) {
          const double w = w_split(x, {y.x1, y.x2});
          if (w <= 1e-12) continue;
          sup = std::max(sup, std::fabs(v_split(x, {y.x1, y.x2}) - v_split(x, {z.x1, z.x2})) / w);
        }
    }
    CHECK(row.sup_ratio == doctest::Approx(sup).epsilon(1e-9));
    CHECK(row.centers == cfg.directions);
  }
  CHECK(rep.strictly_decreasing);
}

TEST_CASE("metric radius scan of the exact form is strictly decreasing") {
  HPScanConfig cfg;
  cfg.sample = unit_square_sample();
  cfg.radii = {10, 20, 40, 80};
  cfg.notion = RadiusNotion::MetricU;
  const auto rep = hp_scan(C, T, cfg);
  CHECK(rep.strictly_decreasing);
  for (const auto& row : rep.rows) {
    CHECK(std::fabs(C({0, 0}, row.x) - row.radius) <= 1e-6 * row.radius);
    CHECK(row.sup_ratio == doctest::Approx(hp_ratio(C, T, row.x, row.y, row.z)));
  }
  // verdict follows the rule on the reported values
  const bool decaying = rep.rows.back().sup_ratio < kHPThreshold;
  CHECK((rep.verdict == HPVerdict::Decaying) == decaying);
}

TEST_CASE("Euclidean ray along the positive axis does not decay") {
  HPScanConfig cfg;
  cfg.sample = unit_square_sample();
  cfg.radii = {10, 20, 40, 80};
  cfg.notion = RadiusNotion::Euclidean;
  cfg.angle_span = 0.0;
  cfg.directions = 1;
  const auto rep = hp_scan(C, T, cfg);
  CHECK(rep.verdict == HPVerdict::NotDecaying);
  // W(x, y) is bounded along the ray since Ds(x, y) -> 2^{-y1}/ln 2
  for (const auto& row : rep.rows) CHECK(row.sup_ratio > 1.0);
}

TEST_CASE("scan configuration is validated and reproducible") {
  HPScanConfig cfg;
  cfg.sample = unit_square_sample();
  cfg.radii = {20, 10};
  CHECK_THROWS_AS(hp_scan(C, T, cfg), Error);
  cfg.radii = {};
  CHECK_THROWS_AS(hp_scan(C, T, cfg), Error);
  cfg.radii = {10, 20};
  cfg.sample.clear();
  CHECK_THROWS_AS(hp_scan(C, T, cfg), Error);
  cfg.sample = unit_square_sample();
  cfg.pair_budget = 50;
  cfg.seed = 7;
  const auto a = hp_scan(C, T, cfg), b = hp_scan(C, T, cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].sup_ratio == b.rows[i].sup_ratio);
}

TEST_CASE("non-positive W samples are excluded and counted") {
  HPScanConfig cfg;
  cfg.sample = {{0, 0}, {0, 1}};
  cfg.radii = {10};
  cfg.notion = RadiusNotion::Euclidean;
  cfg.directions = 4;
  // the identity map has W = 0 everywhere
  const auto rep = hp_scan(C, PlaneMap::identity(), cfg);
  CHECK(rep.rows[0].exclusions > 0);
  CHECK(rep.rows[0].sup_ratio == 0.0);
}
