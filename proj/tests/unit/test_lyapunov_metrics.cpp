#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "planedyn/error.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/path_optimizer.hpp"

using namespace planedyn;

namespace {

std::vector<std::pair<Point, Point>> random_pairs(int n, double half, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<std::pair<Point, Point>> out;
  for (int i = 0; i < n; ++i) {
    const Point p{u(rng), u(rng)};
    const Point q{u(rng), u(rng)};
    out.emplace_back(p, q);
  }
  return out;
}

}  // namespace

TEST_CASE("exact form components") {
  const auto m = LyapunovMetric::exact_form(2.0);
  const Components a = m.components({0, 0}, {1, 0});
  CHECK(a.ds == doctest::Approx(0.5 / std::log(2.0)));
  CHECK(a.ds == doctest::Approx(0.72135).epsilon(1e-5));
  CHECK(a.du == 0.0);
  const Components b = m.components({0, 0}, {0, 1});
  CHECK(b.ds == 0.0);
  CHECK(b.du == 1.0);
  CHECK(b.u == 1.0);
  const Components z = m.components({3, -2}, {3, -2});
  CHECK(z.u == 0.0);
}

TEST_CASE("component formulas against independent evaluation") {
  const auto C = LyapunovMetric::exact_form(2.0);
  const auto B = LyapunovMetric::strip_restricted(2.0);
  const auto D = LyapunovMetric::euclidean_split(2.0);
  for (const auto& [p, q] : random_pairs(200, 8.0, 3)) {
    const oracle::P op{p.x1, p.x2}, oq{q.x1, q.x2};
    CHECK(C.components(p, q).ds == doctest::Approx(oracle::ds_exact(2, op, oq)).epsilon(1e-12));
    CHECK(C.components(p, q).du == doctest::Approx(oracle::du_exact(2, op, oq)).epsilon(1e-12));
    CHECK(B.components(p, q).ds == C.components(p, q).ds);
    CHECK(B.components(p, q).du == doctest::Approx(oracle::du_strip(2, op, oq)).epsilon(1e-12));
    CHECK(D(p, q) == doctest::Approx(oracle::u_split(op, oq)));
    CHECK(C(p, q) == C(q, p));
  }
  // B and C agree on Du when p1 = q1
  CHECK(B.components({1.5, 0.2}, {1.5, 3}).du == doctest::Approx(C.components({1.5, 0.2}, {1.5, 3}).du));
}

TEST_CASE("conjugated metric pulls back the base") {
  const auto H = PlaneMap::shear(0.5);
  const auto C = LyapunovMetric::exact_form(2.0);
  const auto E = LyapunovMetric::conjugated(H, C);
  for (const auto& [p, q] : random_pairs(50, 4.0, 9)) {
    const auto hp = oracle::shear(0.5, {p.x1, p.x2});
    const auto hq = oracle::shear(0.5, {q.x1, q.x2});
    CHECK(E(p, q) == doctest::Approx(oracle::u_exact(2, hp, hq)).epsilon(1e-10));
  }
  CHECK(E({1, 2}, {1, 2}) == 0.0);
}

TEST_CASE("scaling identities") {
  const auto pairs = random_pairs(1000, 8.0, 1);
  const auto T = PlaneMap::translation({1, 0});
  for (const auto& m : {LyapunovMetric::exact_form(2.0), LyapunovMetric::strip_restricted(2.0)}) {
    const auto dev = scaling_check(m, T, pairs);
    CHECK(dev.stable <= 1e-9);
    CHECK(dev.unstable <= 1e-9);
  }
  const auto dev_d = scaling_check(LyapunovMetric::euclidean_split(2.0), PlaneMap::linear_hyperbolic(2.0), pairs);
  CHECK(dev_d.stable <= 1e-12);
  CHECK(dev_d.unstable <= 1e-12);

  // g = H^{-1} T H with L = C(H., H.): pairs mapped through H^{-1}
  const auto H = PlaneMap::shear(0.5);
  const auto g = PlaneMap::conjugated(H, T);
  std::vector<std::pair<Point, Point>> pulled;
  for (const auto& [p, q] : pairs) pulled.emplace_back(H.inverse(p), H.inverse(q));
  const auto dev_e = scaling_check(LyapunovMetric::conjugated(H, LyapunovMetric::exact_form(2.0)), g, pulled);
  CHECK(dev_e.stable <= 1e-9);
  CHECK(dev_e.unstable <= 1e-9);
}

TEST_CASE("mode D is only paired with the hyperbolic map") {
  CHECK_THROWS_AS(validate_pairing(LyapunovMetric::euclidean_split(2.0), PlaneMap::translation({1, 0})), Error);
  CHECK_NOTHROW(validate_pairing(LyapunovMetric::euclidean_split(2.0), PlaneMap::linear_hyperbolic(2.0)));
}

TEST_CASE("axiom scan") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng);
    pts.push_back({a, u(rng)});
  }
  const auto c = metric_axiom_scan(LyapunovMetric::exact_form(2.0), pts);
  CHECK(c.triangle_violations == 0);
  CHECK(c.symmetry_deviation == 0.0);
  CHECK(c.identity_deviation == 0.0);
  CHECK(metric_axiom_scan(LyapunovMetric::euclidean_split(2.0), pts).triangle_violations == 0);

  // U(p, r) = 32 directly, about 3.8 through the point at x1 = 0
  std::vector<Point> three{{5, 0}, {0, 0.5}, {5, 1}};
  const auto b = metric_axiom_scan(LyapunovMetric::strip_restricted(2.0), three);
  CHECK(b.triangle_violations >= 1);
  REQUIRE(b.witness);
  const auto B = LyapunovMetric::strip_restricted(2.0);
  const auto& w = *b.witness;
  CHECK(B(w[0], w[2]) > B(w[0], w[1]) + B(w[1], w[2]) + 1e-9);
}

TEST_CASE("path cost integrates exactly on segments") {
  const std::vector<Point> path{{0, 0}, {1, 0.5}, {-2, 1}, {0.5, 3}};
  std::vector<oracle::P> op;
  for (Point p : path) op.push_back({p.x1, p.x2});
  CHECK(path_cost(Weight::Stable, 2.0, path) == doctest::Approx(oracle::path_cost_midpoint(true, 2.0, op)).epsilon(1e-7));
  CHECK(path_cost(Weight::Unstable, 2.0, path) ==
        doctest::Approx(oracle::path_cost_midpoint(false, 2.0, op)).epsilon(1e-7));
}

TEST_CASE("numeric path infimum") {
  PathFamily fam;
  fam.detour = 0.0;
  const auto s = path_infimum_numeric(Weight::Stable, 2.0, {0, 0}, {1, 0}, fam);
  CHECK(s.cost == doctest::Approx(oracle::ds_exact(2, {0, 0}, {1, 0})).epsilon(1e-4));
  CHECK(s.cost >= oracle::ds_exact(2, {0, 0}, {1, 0}) - 1e-6);

  const auto u0 = path_infimum_numeric(Weight::Unstable, 2.0, {0, 0}, {0, 1}, fam);
  CHECK(u0.cost == doctest::Approx(1.0).epsilon(1e-6));

  fam.detour = 10.0;
  const auto u10 = path_infimum_numeric(Weight::Unstable, 2.0, {0, 0}, {0, 1}, fam);
  CHECK(u10.cost <= std::pow(2.0, -10) + 0.01);
  // explicit three-leg detour: left to -10, climb, return
  const std::vector<oracle::P> detour{{0, 0}, {-10, 0}, {-10, 1}, {0, 1}};
  CHECK(oracle::path_cost_midpoint(false, 2.0, detour) == doctest::Approx(std::pow(2.0, -10)));
}

TEST_CASE("path-infimum mode evaluates path infima") {
  PathFamily fam;
  fam.detour = 0.0;
  const auto A = LyapunovMetric::paper_literal(2.0, fam);
  const Components c = A.components({0, 0}, {1, 0});
  CHECK(c.ds == doctest::Approx(0.72135).epsilon(1e-4));
  CHECK(A({0, 0}, {0, 0}) == 0.0);
}
