#include <doctest.h>

#include <cmath>
#include <sstream>

#include "planedyn/error.hpp"
#include "planedyn/report_io.hpp"

using namespace planedyn;

TEST_CASE("map and metric specs") {
  const auto T = map_from_json(json::parse(R"({"kind": "translation", "params": {"v": [1, 0]}})"));
  CHECK(T.kind() == MapKind::Translation);
  CHECK(T.forward({0, 0}) == Point{1, 0});
  const auto g = map_from_json(json::parse(
      R"({"kind": "translation", "params": {"v": [1, 0]}, "conjugator": {"kind": "shear", "params": {"amplitude": 0.5}}})"));
  CHECK(g.kind() == MapKind::Conjugated);
  CHECK(g.forward({0, 0}).x2 == doctest::Approx(-0.5 * std::sin(1.0)));
  CHECK(map_from_json(json::parse(R"({"kind": "linear_hyperbolic", "params": {"lambda": 3}})")).lambda() == 3.0);

  const auto E = metric_from_json(json::parse(
      R"({"mode": "E", "conjugator": {"kind": "shear", "params": {"amplitude": 0.5}}, "base": {"mode": "C", "lambda": 2}})"));
  CHECK(E.mode() == MetricMode::Conjugated);
  CHECK(metric_from_json(json::parse(R"({"mode": "B", "lambda": 2})")).mode() == MetricMode::StripRestricted);
  CHECK(metric_from_json(json::parse(R"({"mode": "A", "detour": 3})")).family().detour == 3.0);

  CHECK_THROWS_AS(map_from_json(json::parse(R"({"kind": "rotation"})")), Error);
  CHECK_THROWS_AS(map_from_json(json::parse(R"({"params": {}})")), Error);
  CHECK_THROWS_AS(metric_from_json(json::parse(R"({"mode": "Z"})")), Error);
  CHECK_THROWS_AS(metric_from_json(json::parse(R"({"mode": "E"})")), Error);
  CHECK_THROWS_AS(metric_from_json(json::parse(R"({"mode": "C", "lambda": "two"})")), Error);
}

TEST_CASE("points and boxes") {
  CHECK(parse_point("0.5,-2") == Point{0.5, -2});
  CHECK(parse_point(" 1 , 2 ") == Point{1, 2});
  CHECK_THROWS_AS(parse_point("1;2"), Error);
  CHECK_THROWS_AS(parse_point("1,x"), Error);
  CHECK_THROWS_AS(box_from_json(json::parse("[[1, 1], [0, 2]]")), Error);
}

TEST_CASE("FNV-1a 64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  // key order does not matter, values do
  CHECK(config_hash(json::parse(R"({"a": 1, "b": 2})")) == config_hash(json::parse(R"({"b": 2, "a": 1})")));
  CHECK(config_hash(json::parse(R"({"a": 1})")) != config_hash(json::parse(R"({"a": 2})")));
  CHECK(config_hash(json::object()).size() == 16);
}

TEST_CASE("decimal formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("polyline and field CSV") {
  std::ostringstream out;
  write_polyline_csv(out, Polyline({{0, 0}, {1.5, -2}}));
  CHECK(out.str() == "x1,x2\n0,0\n1.5,-2\n");

  EscapeTimeField f;
  f.grid.window = Box{{0, 0}, {1, 1}};
  f.grid.spacing = 1.0;
  f.nx = f.ny = 2;
  f.values = {kNoEscape, 3, 0, kNoEscape};
  f.n_max = 40;
  std::ostringstream csv;
  write_escape_field_csv(csv, f);
  CHECK(csv.str() == "x1,x2,escape_n\n0,0,-1\n1,0,3\n0,1,0\n1,1,-1\n");
  std::ostringstream svg;
  write_svg_heatmap(svg, f);
  CHECK(svg.str().find("<svg") == 0);
  CHECK(svg.str().find("rgb(0,0,255)") != std::string::npos);
}

TEST_CASE("JSON records") {
  SignProbeResult r;
  r.x = {0, 0};
  r.k = 1;
  r.y_plus = {0, 1};
  r.v_plus = 1;
  r.z_minus = {1.2, 0};
  r.v_minus = -0.5;
  const json j = to_json(r);
  for (const char* key : {"x", "k", "y_plus", "V_plus", "z_minus", "V_minus"}) CHECK(j.contains(key));
  CHECK(j["y_plus"] == json::array({0.0, 1.0}));

  HPScanReport rep;
  rep.rows.push_back({10, 0.5, {1, 0}, {0, 0}, {0, 1}, 0, 72});
  rep.rows.push_back({20, 0.01, {2, 0}, {0, 0}, {0, 1}, 0, 72});
  rep.verdict = HPVerdict::Decaying;
  CHECK(to_json(rep)["verdict"] == "Decaying");
  std::ostringstream csv;
  write_hp_csv(csv, rep);
  CHECK(csv.str() == "radius,sup_ratio,x1,x2\n10,0.5,1,0\n20,0.01,2,0\n");
  std::ostringstream svg;
  write_svg_decay(svg, rep);
  CHECK(svg.str().find("stroke-dasharray") != std::string::npos);
}
