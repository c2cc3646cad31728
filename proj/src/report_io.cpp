#include "planedyn/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "planedyn/error.hpp"

namespace planedyn {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

double number(const json& j, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string("\"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

const json& params_of(const json& spec) {
  static const json empty = json::object();
  if (!spec.contains("params")) return empty;
  const json& p = spec.at("params");
  if (!p.is_object()) bad("map \"params\" must be an object");
  return p;
}

}  // namespace

PlaneMap map_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    bad("map spec needs a string \"kind\"");
  const std::string kind = spec.at("kind").get<std::string>();
  const json& params = params_of(spec);

  PlaneMap map = PlaneMap::identity();
  if (kind == "translation") {
    map = PlaneMap::translation(params.contains("v") ? point_from_json(params.at("v")) : Point{1.0, 0.0});
  } else if (kind == "linear_hyperbolic") {
    map = PlaneMap::linear_hyperbolic(number(params, "lambda", 2.0));
  } else if (kind == "identity") {
    map = PlaneMap::identity();
  } else if (kind == "shear") {
    map = PlaneMap::shear(number(params, "amplitude", 0.5));
  } else if (kind == "composition") {
    if (!params.contains("maps") || !params.at("maps").is_array()) bad("composition needs \"maps\"");
    std::vector<PlaneMap> parts;
    for (const json& m : params.at("maps")) parts.push_back(map_from_json(m));
    map = PlaneMap::composition(std::move(parts));
  } else {
    bad("unknown map kind \"" + kind + "\"");
  }
  if (spec.contains("conjugator")) map = PlaneMap::conjugated(map_from_json(spec.at("conjugator")), map);
  return map;
}

LyapunovMetric metric_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("mode") || !spec.at("mode").is_string())
    bad("metric spec needs a string \"mode\"");
  const std::string mode = spec.at("mode").get<std::string>();
  const double lambda = number(spec, "lambda", 2.0);
  if (mode == "A") {
    PathFamily family;
    family.control_points = static_cast<int>(number(spec, "control_points", family.control_points));
    family.detour = number(spec, "detour", family.detour);
    family.restarts = static_cast<int>(number(spec, "restarts", family.restarts));
    family.evaluation_budget = static_cast<long>(number(spec, "evaluation_budget", 1e5));
    family.seed = static_cast<std::uint64_t>(number(spec, "seed", 1.0));
    return LyapunovMetric::paper_literal(lambda, family);
  }
  if (mode == "B") return LyapunovMetric::strip_restricted(lambda);
  if (mode == "C") return LyapunovMetric::exact_form(lambda);
  if (mode == "D") return LyapunovMetric::euclidean_split(lambda);
  if (mode == "E") {
    if (!spec.contains("conjugator")) bad("mode E needs a \"conjugator\" map spec");
    const LyapunovMetric base =
        spec.contains("base") ? metric_from_json(spec.at("base")) : LyapunovMetric::exact_form(lambda);
    return LyapunovMetric::conjugated(map_from_json(spec.at("conjugator")), base);
  }
  bad("unknown metric mode \"" + mode + "\"");
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad("a point is [x1, x2]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Point parse_point(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) bad("expected x1,x2 but got \"" + std::string(text) + "\"");
  const auto parse = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      bad("not a number: \"" + std::string(s) + "\"");
    return v;
  };
  return {parse(text.substr(0, comma)), parse(text.substr(comma + 1))};
}

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("a box is [[lo1, lo2], [hi1, hi2]]");
  const Box b{point_from_json(j[0]), point_from_json(j[1])};
  if (!(b.lo.x1 < b.hi.x1 && b.lo.x2 < b.hi.x2)) bad("box corners out of order");
  return b;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

json to_json(Point p) { return json::array({p.x1, p.x2}); }
json to_json(const Box& b) { return json::array({to_json(b.lo), to_json(b.hi)}); }
json to_json(const Components& c) { return {{"Ds", c.ds}, {"Du", c.du}, {"U", c.u}}; }

json to_json(const AxiomReport& r) {
  json j{{"symmetry_deviation", r.symmetry_deviation},
         {"identity_deviation", r.identity_deviation},
         {"triangle_violations", r.triangle_violations}};
  if (r.witness) j["witness"] = {to_json((*r.witness)[0]), to_json((*r.witness)[1]), to_json((*r.witness)[2])};
  return j;
}

json to_json(const SignProbeResult& r) {
  return {{"x", to_json(r.x)},           {"k", r.k},
          {"y_plus", to_json(r.y_plus)}, {"V_plus", r.v_plus},
          {"z_minus", to_json(r.z_minus)}, {"V_minus", r.v_minus},
          {"directions_on_sphere", r.directions_on_sphere}};
}

json to_json(const ExpansivenessCertificate& c) {
  return {{"n", c.n},
          {"separation", c.separation},
          {"growth_bound_holds", c.growth_bound_holds},
          {"growth_checks", c.growth_checks}};
}

json to_json(const Truncation& t) {
  return {{"n_max", t.n_max},
          {"k", t.k},
          {"step", t.step},
          {"smallest_step", t.smallest_step},
          {"arclength_budget", t.arclength_budget},
          {"front_at_window", t.front_at_window},
          {"back_at_window", t.back_at_window}};
}

json to_json(const HPScanReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"radius", row.radius},
                    {"sup_ratio", row.sup_ratio},
                    {"x", to_json(row.x)},
                    {"y", to_json(row.y)},
                    {"z", to_json(row.z)},
                    {"exclusions", row.exclusions},
                    {"centers", row.centers}});
  return {{"rows", rows}, {"verdict", to_string(r.verdict)}, {"strictly_decreasing", r.strictly_decreasing}};
}

json to_json(const SeparationReport& r) {
  json ev = json::array();
  for (const auto& e : r.evidence)
    ev.push_back({{"candidate", to_string(e.candidate)},
                  {"p", to_json(e.p)},
                  {"q", to_json(e.q)},
                  {"separated", e.separated}});
  return {{"separator", to_string(r.separator)}, {"evidence", ev}, {"window", to_json(r.window)}};
}

json to_json(const ResidualStats& r) {
  json nc = json::array();
  for (Point p : r.not_covered) nc.push_back(to_json(p));
  return {{"max", r.max}, {"mean", r.mean}, {"evaluated", r.evaluated}, {"not_covered", nc}};
}

void write_polyline_csv(std::ostream& out, const Polyline& line) {
  out << "x1,x2\n";
  for (Point p : line.vertices()) out << format_double(p.x1) << ',' << format_double(p.x2) << '\n';
}

void write_escape_field_csv(std::ostream& out, const EscapeTimeField& field) {
  out << "x1,x2,escape_n\n";
  for (std::size_t j = 0; j < field.ny; ++j)
    for (std::size_t i = 0; i < field.nx; ++i) {
      const Point p = field.node(i, j);
      out << format_double(p.x1) << ',' << format_double(p.x2) << ',' << field.at(i, j) << '\n';
    }
}

void write_hp_csv(std::ostream& out, const HPScanReport& report) {
  out << "radius,sup_ratio,x1,x2\n";
  for (const auto& row : report.rows)
    out << format_double(row.radius) << ',' << format_double(row.sup_ratio) << ',' << format_double(row.x.x1)
        << ',' << format_double(row.x.x2) << '\n';
}

namespace {

struct Frame {
  Box window;
  double scale;
  int width, height;

  Frame(const Box& w, int pixels) : window(w) {
    scale = pixels / std::max(w.width(), w.height());
    width = static_cast<int>(std::lround(w.width() * scale));
    height = static_cast<int>(std::lround(w.height() * scale));
  }
  double sx(double x) const { return (x - window.lo.x1) * scale; }
  double sy(double y) const { return (window.hi.x2 - y) * scale; }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void open_svg(std::ostream& out, int width, int height) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

void write_svg_layers(std::ostream& out, const Box& window, const std::vector<SvgLayer>& layers, int pixels) {
  const Frame f(window, pixels);
  open_svg(out, f.width, f.height);
  // Axes through the origin when visible.
  if (window.lo.x2 <= 0.0 && window.hi.x2 >= 0.0)
    out << "<line x1=\"0\" y1=\"" << fmt2(f.sy(0)) << "\" x2=\"" << f.width << "\" y2=\"" << fmt2(f.sy(0))
        << "\" stroke=\"#ccc\"/>\n";
  if (window.lo.x1 <= 0.0 && window.hi.x1 >= 0.0)
    out << "<line x1=\"" << fmt2(f.sx(0)) << "\" y1=\"0\" x2=\"" << fmt2(f.sx(0)) << "\" y2=\"" << f.height
        << "\" stroke=\"#ccc\"/>\n";
  for (const SvgLayer& layer : layers) {
    if (layer.markers) {
      for (Point p : layer.points) {
        if (!window.contains(p)) continue;
        out << "<circle cx=\"" << fmt2(f.sx(p.x1)) << "\" cy=\"" << fmt2(f.sy(p.x2)) << "\" r=\"2\" fill=\""
            << layer.stroke << "\"/>\n";
      }
      continue;
    }
    out << "<polyline fill=\"none\" stroke=\"" << layer.stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < layer.points.size(); ++i) {
      // Clamp far-off vertices so the viewer is not fed huge coordinates.
      const Point p = layer.points[i];
      const double x = std::clamp(f.sx(p.x1), -10.0 * f.width, 11.0 * f.width);
      const double y = std::clamp(f.sy(p.x2), -10.0 * f.height, 11.0 * f.height);
      out << (i ? " " : "") << fmt2(x) << ',' << fmt2(y);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_svg_heatmap(std::ostream& out, const EscapeTimeField& field, int pixels) {
  const double cells = static_cast<double>(std::max(field.nx, field.ny));
  const double cell = pixels / std::max(cells, 1.0);
  const int width = static_cast<int>(std::lround(cell * field.nx));
  const int height = static_cast<int>(std::lround(cell * field.ny));
  open_svg(out, width, height);
  const int n_max = std::max(field.n_max, 1);
  for (std::size_t j = 0; j < field.ny; ++j) {
    for (std::size_t i = 0; i < field.nx; ++i) {
      const int e = field.at(i, j);
      int shade = 0;
      if (e != kNoEscape) shade = 255 - static_cast<int>(std::lround(200.0 * e / n_max));
      out << "<rect x=\"" << fmt2(cell * i) << "\" y=\"" << fmt2(cell * (field.ny - 1 - j)) << "\" width=\""
          << fmt2(cell) << "\" height=\"" << fmt2(cell) << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
    }
  }
  out << "</svg>\n";
}

void write_svg_decay(std::ostream& out, const HPScanReport& report, int pixels) {
  const int width = pixels, height = pixels * 3 / 4, margin = 40;
  open_svg(out, width, height);
  double top = kHPThreshold;
  for (const auto& row : report.rows) top = std::max(top, row.sup_ratio);
  top *= 1.1;
  const std::size_t n = report.rows.size();
  const auto px = [&](std::size_t i) { return margin + (width - 2.0 * margin) * (n > 1 ? double(i) / (n - 1) : 0.5); };
  const auto py = [&](double r) { return height - margin - (height - 2.0 * margin) * r / top; };
  out << "<line x1=\"" << margin << "\" y1=\"" << fmt2(py(kHPThreshold)) << "\" x2=\"" << width - margin
      << "\" y2=\"" << fmt2(py(kHPThreshold)) << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << fmt2(px(i)) << ',' << fmt2(py(report.rows[i].sup_ratio));
  out << "\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "<circle cx=\"" << fmt2(px(i)) << "\" cy=\"" << fmt2(py(report.rows[i].sup_ratio))
        << "\" r=\"3\"/>\n";
    out << "<text x=\"" << fmt2(px(i)) << "\" y=\"" << height - margin / 3 << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">R=" << format_double(report.rows[i].radius) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace planedyn
