#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "planedyn/error.hpp"
#include "planedyn/geometry.hpp"

using namespace planedyn;

namespace {

Polyline sampled(double lo, double hi, int n, auto&& f) {
  std::vector<Point> v;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    v.push_back(f(t));
  }
  return Polyline(std::move(v));
}

Polyline x_axis(double half = 10.0) { return sampled(-half, half, 200, [](double t) { return Point{t, 0.0}; }); }

Polyline level_curve(double c, double lo = -4.0, double hi = 4.0) {
  return sampled(lo, hi, 800, [c](double t) { return Point{t, c * std::pow(2.0, -t)}; });
}

}  // namespace

TEST_CASE("polyline construction rejects invalid input") {
  CHECK_THROWS_AS(Polyline({{0, 0}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {NAN, 1}}), Error);
  // bow tie crosses itself
  CHECK_THROWS_AS(Polyline({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
  const Polyline ok({{0, 0}, {3, 4}, {3, 5}});
  CHECK(ok.length() == doctest::Approx(6.0));
  CHECK_FALSE(ok.closed());
}

TEST_CASE("perpendicular lines cross once") {
  const Polyline vertical = sampled(-10, 10, 200, [](double t) { return Point{3.0, t}; });
  const CrossingReport r = crossing_points(x_axis(), vertical);
  REQUIRE(r.count == 1);
  CHECK(r.points[0].x1 == doctest::Approx(3.0));
  CHECK(r.points[0].x2 == doctest::Approx(0.0));
  CHECK(r.parities.size() == 1);
  CHECK(crossing_points(vertical, x_axis()).count == 1);
}

TEST_CASE("parallel curves do not cross") {
  const Polyline up = sampled(-10, 10, 200, [](double t) { return Point{t, 1.0}; });
  CHECK(crossing_points(x_axis(), up).count == 0);
}

TEST_CASE("exponential graph meets x1 = 3 at 2^-3") {
  const Polyline vertical = sampled(-10, 10, 50, [](double t) { return Point{3.0, t}; });
  const CrossingReport r = crossing_points(level_curve(1.0), vertical);
  REQUIRE(r.count == 1);
  CHECK(r.points[0].x2 == doctest::Approx(0.125).epsilon(1e-4));
}

TEST_CASE("crossing count is symmetric and agrees with brute force") {
  std::vector<oracle::P> a, b;
  std::vector<Point> pa, pb;
  for (int i = 0; i <= 300; ++i) {
    const double t = -6.0 + 12.0 * i / 300;
    pa.push_back({t, std::sin(t)});
    pb.push_back({t, 0.3 * t + 0.01});
    a.push_back({t, std::sin(t)});
    b.push_back({t, 0.3 * t + 0.01});
  }
  const Polyline A(pa), B(pb);
  const auto n = crossing_points(A, B).count;
  CHECK(n == crossing_points(B, A).count);
  CHECK(static_cast<int>(n) == oracle::brute_crossings(a, b));
}

TEST_CASE("collinear overlap is reported, not counted") {
  const Polyline a({{0, 0}, {2, 0}});
  const Polyline b({{1, 0}, {3, 0}});
  CHECK_THROWS_AS(crossing_points(a, b), Error);
}

TEST_CASE("crossing at a shared vertex is counted once") {
  const Polyline a({{-1, 0}, {0, 0}, {1, 0}});
  const Polyline b({{0, -1}, {0, 0}, {0, 1}});
  CHECK(crossing_points(a, b).count == 1);
  // touching without crossing
  const Polyline c({{-1, 1}, {0, 0}, {1, 1}});
  CHECK(crossing_points(a, c).count % 2 == 0);
}

TEST_CASE("separation by crossing parity") {
  const Polyline axis = x_axis();
  CHECK(separates(axis, {0, 1}, {0, -1}));
  CHECK_FALSE(separates(axis, {0, 1}, {1, 2}));
  CHECK(separates(axis, {0, -1}, {0, 1}) == separates(axis, {0, 1}, {0, -1}));
  CHECK(separates(level_curve(1.0), {0, 0}, {0, 2}));
  CHECK_THROWS_AS(separates(axis, {0, 1e-12}, {0, 1}), Error);
  // curve ending between the points
  const Polyline stub({{-1, 0}, {0.5, 0}});
  CHECK_THROWS_AS(separates(stub, {0, 1}, {0, -1}), Error);
}

TEST_CASE("graph curves separate points strictly above and below") {
  for (double x : {-3.0, -1.0, 0.0, 2.5}) {
    const double y = std::pow(2.0, -x);
    CHECK(separates(level_curve(1.0, -6, 6), {x, y + 0.3}, {x + 0.2, y - 0.3 * y}));
  }
}

TEST_CASE("region between two level curves") {
  const Polyline lower = level_curve(1.0, -6, 6), upper = level_curve(2.0, -6, 6);
  CHECK(region_between_membership(lower, upper, {0, 1.5}) == Region::Inside);
  CHECK(region_between_membership(lower, upper, {0, 3}) == Region::Outside);
  CHECK(region_between_membership(lower, upper, {0, 1}) == Region::Boundary);
  MembershipOptions square;
  square.window = Box::square(6.0);
  CHECK(region_between_membership(lower, upper, {0, -1}, square) == Region::Outside);
  CHECK_THROWS_AS(region_between_membership(lower, upper, {0, -1}), Error);
  // phi = 2^x y between 1 and 2
  for (double x : {-2.0, 0.5, 3.0})
    for (double phi : {0.5, 1.25, 1.75, 2.5}) {
      const Region r = region_between_membership(lower, upper, {x, phi * std::pow(2.0, -x)});
      CHECK(r == (phi > 1 && phi < 2 ? Region::Inside : Region::Outside));
    }
}

TEST_CASE("membership outside the window is inconclusive") {
  const Polyline lower = level_curve(1.0), upper = level_curve(2.0);
  MembershipOptions opt;
  opt.window = Box::square(3.0);
  CHECK_THROWS_AS(region_between_membership(lower, upper, {10, 0}, opt), Error);
}

TEST_CASE("projection and Hausdorff distance") {
  const Polyline a({{0, 0}, {10, 0}});
  const auto pr = a.project({4, 3});
  CHECK(pr.distance == doctest::Approx(3.0));
  CHECK(pr.arclength == doctest::Approx(4.0));
  const Polyline b({{0, 1}, {10, 1}});
  CHECK(hausdorff(a, b) == doctest::Approx(1.0));
  // long polylines go through the segment index; compare with brute force
  const Polyline curve = level_curve(1.0, -6, 6);
  std::vector<oracle::P> poly;
  for (Point v : curve.vertices()) poly.push_back({v.x1, v.x2});
  for (Point q : {Point{0.3, 2.0}, Point{-3, 1}, Point{5, -2}, Point{-5.9, 70}})
    CHECK(curve.distance_to(q) == doctest::Approx(oracle::distance_to_polyline({q.x1, q.x2}, poly)).epsilon(1e-12));
}

TEST_CASE("orientation predicate is exact on near-degenerate input") {
  CHECK(orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
  CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
  const double up = std::nextafter(24.0, 25.0), down = std::nextafter(24.0, 23.0);
  CHECK(orient2d({0.5, 0.5}, {12, 12}, {24, up}) == 1);
  CHECK(orient2d({0.5, 0.5}, {12, 12}, {24, down}) == -1);
  CHECK(orient2d({0.1, 0.1}, {0.3, 0.3}, {0.7, 0.7}) == -orient2d({0.3, 0.3}, {0.1, 0.1}, {0.7, 0.7}));
}
