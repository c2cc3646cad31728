#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "planedyn/error.hpp"
#include "planedyn/plane_map.hpp"

using namespace planedyn;

TEST_CASE("evaluate the built-in maps") {
  const auto T = PlaneMap::translation({1, 0});
  CHECK(evaluate(T, {0, 0}, 5) == Point{5, 0});
  CHECK(evaluate(T, {0, 0}, -3) == Point{-3, 0});
  CHECK(evaluate(T, {2, 7}, 0) == Point{2, 7});
  const auto L = PlaneMap::linear_hyperbolic(2.0);
  CHECK(evaluate(L, {1, 1}, 1) == Point{2, 0.5});
  CHECK_THROWS_AS(PlaneMap::linear_hyperbolic(1.0), Error);
}

TEST_CASE("conjugated shift matches the hand composition") {
  const auto g = PlaneMap::conjugated(PlaneMap::shear(0.5), PlaneMap::translation({1, 0}));
  const Point p = evaluate(g, {0, 0}, 1);
  CHECK(p.x1 == doctest::Approx(1.0));
  CHECK(p.x2 == doctest::Approx(-0.5 * std::sin(1.0)).epsilon(1e-12));
  CHECK(p.x2 == doctest::Approx(-0.42074).epsilon(1e-5));
  for (double x = -3; x <= 3; x += 0.75)
    for (double y = -2; y <= 2; y += 0.5) {
      const auto o = oracle::conj_shift(0.5, {x, y});
      const Point q = g.forward({x, y});
      CHECK(q.x1 == doctest::Approx(o.x).epsilon(1e-12));
      CHECK(std::fabs(q.x2 - o.y) <= 1e-9);
    }
}

TEST_CASE("roundtrip contract") {
  const auto sample = grid_points(Box::square(10.0), 11);
  CHECK(roundtrip_check(PlaneMap::translation({1, 0}), sample) == 0.0);
  CHECK(roundtrip_check(PlaneMap::linear_hyperbolic(2.0), sample) <= 1e-12);
  const auto g = PlaneMap::conjugated(PlaneMap::shear(0.5), PlaneMap::translation({1, 0}));
  CHECK(roundtrip_check(g, sample) <= 1e-9);
}

TEST_CASE("iteration composes") {
  const auto g = PlaneMap::conjugated(PlaneMap::shear(0.5), PlaneMap::translation({1, 0}));
  const Point p{0.3, -0.7};
  for (int n : {-50, -7, 0, 13, 50})
    for (int m : {-20, 4, 50}) {
      const Point a = evaluate(g, p, n + m);
      const Point b = evaluate(g, evaluate(g, p, n), m);
      CHECK(distance(a, b) <= 1e-8);
    }
}

TEST_CASE("overflow is an error") {
  const auto L = PlaneMap::linear_hyperbolic(2.0);
  CHECK_THROWS_AS(evaluate(L, {1, 1}, 1100), Error);
  CHECK_THROWS_AS(evaluate(PlaneMap::translation({1, 0}), {0, 0}, 20000), Error);
}

TEST_CASE("fixed point free scan") {
  const Box box = Box::square(32.0);
  CHECK(fixed_point_free_scan(PlaneMap::translation({1, 0}), box, 0.5).min_displacement == doctest::Approx(1.0));
  CHECK(fixed_point_free_scan(PlaneMap::linear_hyperbolic(2.0), box, 0.5).min_displacement <= 1e-12);
  const auto g = PlaneMap::conjugated(PlaneMap::shear(0.5), PlaneMap::translation({1, 0}));
  CHECK(fixed_point_free_scan(g, box, 0.5).min_displacement >= 0.5);
}

TEST_CASE("orbit segments link consecutive iterates") {
  const auto T = PlaneMap::translation({1, 0});
  const OrbitSegment o = orbit(T, {0, 2}, -3, 3);
  REQUIRE(o.samples.size() == 7);
  for (const auto& s : o.samples) CHECK(s.point == Point{static_cast<double>(s.n), 2});
}
