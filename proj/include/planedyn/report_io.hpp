#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "planedyn/differences.hpp"
#include "planedyn/geometry.hpp"
#include "planedyn/hp_estimator.hpp"
#include "planedyn/invariant_sets.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"
#include "planedyn/translation.hpp"

namespace planedyn {

using json = nlohmann::json;

// Config parsing. Malformed specs raise InvalidArgument.

/// {"kind": "translation|linear_hyperbolic|identity|shear|composition",
///  "params": {...}, "conjugator": optional map spec}. A conjugator H turns
/// the described map f into H^{-1} o f o H.
PlaneMap map_from_json(const json& spec);

/// {"mode": "A|B|C|D|E", "lambda": 2.0, ...}. Mode A reads the path family
/// fields, mode E reads "conjugator" (map spec) and "base" (metric spec).
LyapunovMetric metric_from_json(const json& spec);

Point point_from_json(const json& j);
/// "x1,x2" as typed on the command line.
Point parse_point(std::string_view text);
Box box_from_json(const json& j);  // [[lo1, lo2], [hi1, hi2]]

/// FNV-1a 64 over the compact dump (object keys sorted).
std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const json& config);

// Text formatting: shortest round-trip decimal, so outputs are reproducible.
std::string format_double(double v);

json to_json(Point p);
json to_json(const Box& b);
json to_json(const Components& c);
json to_json(const AxiomReport& r);
json to_json(const SignProbeResult& r);
json to_json(const ExpansivenessCertificate& c);
json to_json(const Truncation& t);
json to_json(const HPScanReport& r);
json to_json(const SeparationReport& r);
json to_json(const ResidualStats& r);

void write_polyline_csv(std::ostream& out, const Polyline& line);
/// x1,x2,escape_n with -1 for NoEscape.
void write_escape_field_csv(std::ostream& out, const EscapeTimeField& field);
/// radius,sup_ratio,x1,x2 (x is the witness center).
void write_hp_csv(std::ostream& out, const HPScanReport& report);

struct SvgLayer {
  std::vector<Point> points;
  std::string stroke = "black";
  bool markers = false;  // draw points as dots rather than a line
};

/// Polylines (or point clouds) in a window, y axis up.
void write_svg_layers(std::ostream& out, const Box& window, const std::vector<SvgLayer>& layers, int pixels = 600);
/// Escape times as a grid of rects; NoEscape cells are black.
void write_svg_heatmap(std::ostream& out, const EscapeTimeField& field, int pixels = 600);
/// sup ratio against radius, with the decay threshold drawn as a dashed line.
void write_svg_decay(std::ostream& out, const HPScanReport& report, int pixels = 480);

}  // namespace planedyn
