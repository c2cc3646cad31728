// planedyn: batch front end. Every subcommand reads a JSON config holding a
// map spec and a metric spec, writes its artifacts into the output directory
// and prints the JSON report on stdout.
//
// Exit codes: 0 success, 1 usage error, 2 contract violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "planedyn/differences.hpp"
#include "planedyn/error.hpp"
#include "planedyn/hp_estimator.hpp"
#include "planedyn/invariant_sets.hpp"
#include "planedyn/lyapunov_metric.hpp"
#include "planedyn/plane_map.hpp"
#include "planedyn/report_io.hpp"
#include "planedyn/translation.hpp"

namespace fs = std::filesystem;
using namespace planedyn;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed contract that still produced a report.
struct Violation {
  std::string verdict;
  json report;
};

struct Context {
  json config;
  std::string hash;
  PlaneMap map = PlaneMap::identity();
  LyapunovMetric metric = LyapunovMetric::exact_form(2.0);
  fs::path out;
  std::uint64_t seed = 1;

  const json& section(const char* name) const {
    static const json empty = json::object();
    return config.contains(name) ? config.at(name) : empty;
  }

  json report(const std::string& command) const {
    return {{"command", command},
            {"config_hash", hash},
            {"seed", seed},
            {"map", map.name()},
            {"metric", std::string(1, mode_letter(metric.mode()))}};
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw UsageError("cannot write " + (out / name).string());
    f << text;
  }
};

template <class T>
T setting(const json& section, const char* key, T fallback) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

Point point_setting(const json& section, const char* key, Point fallback) {
  return section.contains(key) ? point_from_json(section.at(key)) : fallback;
}

fs::path resolve_config(const std::string& name) {
  if (fs::exists(name)) return name;
#ifdef PLANEDYN_CONFIG_DIR
  const fs::path shipped = fs::path(PLANEDYN_CONFIG_DIR) / name;
  if (fs::exists(shipped)) return shipped;
#endif
  throw UsageError("config not found: " + name);
}

Context load(const std::string& config_path, const std::string& out_override, std::optional<std::uint64_t> seed) {
  Context ctx;
  std::ifstream in(resolve_config(config_path));
  try {
    ctx.config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (!ctx.config.contains("map") || !ctx.config.contains("metric"))
      throw UsageError("config needs \"map\" and \"metric\"");
    ctx.map = map_from_json(ctx.config.at("map"));
    ctx.metric = metric_from_json(ctx.config.at("metric"));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  ctx.seed = seed ? *seed : setting<std::uint64_t>(ctx.config, "seed", 1);
  ctx.config["seed"] = ctx.seed;
  ctx.hash = config_hash(ctx.config);
  ctx.out = out_override.empty() ? setting<std::string>(ctx.config, "output_dir", "planedyn_out") : out_override;
  fs::create_directories(ctx.out);
  return ctx;
}

std::vector<Point> random_points(std::mt19937_64& rng, const Box& box, int count) {
  std::uniform_real_distribution<double> u1(box.lo.x1, box.hi.x1), u2(box.lo.x2, box.hi.x2);
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = u1(rng);
    pts.push_back({a, u2(rng)});
  }
  return pts;
}

TraceOptions trace_options(const json& s) {
  TraceOptions t;
  t.k = setting(s, "k", t.k);
  t.n_max = setting(s, "n_max", t.n_max);
  t.step = setting(s, "step", t.step);
  t.arclength_budget = setting(s, "arclength_budget", t.arclength_budget);
  t.window = s.contains("window") ? box_from_json(s.at("window")) : t.window;
  return t;
}

Stability parse_stability(const std::string& s) {
  if (s == "stable") return Stability::Stable;
  if (s == "unstable") return Stability::Unstable;
  throw UsageError("stability must be \"stable\" or \"unstable\"");
}

// Subcommands. Each returns the JSON report or throws.

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string x, y;
  std::optional<double> k;
  std::optional<int> n_max;
  std::optional<int> count;
  std::optional<double> step;
  std::string stability = "stable";
};

json metric_eval(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("metric_eval");
  const Box box = s.contains("box") ? box_from_json(s.at("box")) : Box::square(8.0);
  const int count = fl.count.value_or(setting(s, "pairs", 1000));
  std::mt19937_64 rng(ctx.seed);
  const auto a = random_points(rng, box, count);
  const auto b = random_points(rng, box, count);
  std::ostringstream csv;
  csv << "p1,p2,q1,q2,Ds,Du,U\n";
  std::vector<std::pair<Point, Point>> pairs;
  for (int i = 0; i < count; ++i) {
    const Components c = ctx.metric.components(a[i], b[i]);
    csv << format_double(a[i].x1) << ',' << format_double(a[i].x2) << ',' << format_double(b[i].x1) << ','
        << format_double(b[i].x2) << ',' << format_double(c.ds) << ',' << format_double(c.du) << ','
        << format_double(c.u) << '\n';
    pairs.emplace_back(a[i], b[i]);
  }
  ctx.write("metric_eval.csv", csv.str());
  json r = ctx.report("metric-eval");
  r["pairs"] = count;
  const ScalingDeviation dev = scaling_check(ctx.metric, ctx.map, pairs);
  r["scaling"] = {{"stable", dev.stable}, {"unstable", dev.unstable}};
  return r;
}

json axiom_scan(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("axiom_scan");
  const Box box = s.contains("box") ? box_from_json(s.at("box")) : Box::square(8.0);
  std::mt19937_64 rng(ctx.seed);
  auto pts = random_points(rng, box, fl.count.value_or(setting(s, "points", 200)));
  if (s.contains("extra"))
    for (const json& p : s.at("extra")) pts.push_back(point_from_json(p));
  if (pts.size() < 3) throw UsageError("axiom scan needs at least 3 points");
  json r = ctx.report("axiom-scan");
  r["points"] = pts.size();
  r["axioms"] = to_json(metric_axiom_scan(ctx.metric, pts));
  return r;
}

Point point_flag(const std::string& flag, const json& s, const char* key, Point fallback) {
  if (!flag.empty()) {
    try {
      return parse_point(flag);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return point_setting(s, key, fallback);
}

json sign_probe(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("sign_probe");
  const Point x = point_flag(fl.x, s, "x", {0.0, 0.0});
  const double k = fl.k.value_or(setting(s, "k", 1.0));
  if (!(k > 0.0)) throw UsageError("k must be positive");
  json r = ctx.report("sign-probe");
  validate_pairing(ctx.metric, ctx.map);
  r["probe"] = to_json(sphere_sign_probe(ctx.metric, ctx.map, x, k));
  return r;
}

json expansive_cert(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("expansive_cert");
  const Point x = point_flag(fl.x, s, "x", {0.0, 0.0});
  const Point y = point_flag(fl.y, s, "y", {0.0, 1.0});
  const double k = fl.k.value_or(setting(s, "k", 3.0));
  if (x == y) throw UsageError("x and y must differ");
  if (!(k > 0.0)) throw UsageError("k must be positive");
  validate_pairing(ctx.metric, ctx.map);
  json r = ctx.report("expansive-cert");
  r["x"] = to_json(x);
  r["y"] = to_json(y);
  r["k"] = k;
  const DifferenceValues d = differences(ctx.metric, ctx.map, x, y);
  r["V"] = d.v;
  r["W"] = d.w;
  const auto cert = expansiveness_certificate(ctx.metric, ctx.map, x, y, k);
  r["certificate"] = to_json(cert);
  if (!cert.growth_bound_holds) throw Violation{"GrowthBoundFailed", r};
  return r;
}

json stable_set(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("stable_set");
  const Point x = point_flag(fl.x, s, "x", {0.0, 1.0});
  const double k = fl.k.value_or(setting(s, "k", 1.0));
  const int n_max = fl.n_max.value_or(setting(s, "n_max", 40));
  GridSpec grid;
  grid.window = s.contains("window") ? box_from_json(s.at("window")) : grid.window;
  grid.spacing = fl.step.value_or(setting(s, "spacing", 0.02));
  const Stability st = parse_stability(setting<std::string>(s, "stability", fl.stability));
  validate_pairing(ctx.metric, ctx.map);
  const StableComponent comp =
      k_stable_component(ctx.metric, ctx.map, x, k, n_max, grid, iteration_direction(st));
  std::ostringstream csv, svg;
  write_escape_field_csv(csv, comp.field);
  write_svg_heatmap(svg, comp.field);
  ctx.write("escape_field.csv", csv.str());
  ctx.write("stable_set.svg", svg.str());
  long no_escape = 0;
  for (int v : comp.field.values) no_escape += v == kNoEscape;
  json r = ctx.report("stable-set");
  r["x"] = to_json(x);
  r["k"] = k;
  r["n_max"] = n_max;
  r["stability"] = to_string(st);
  r["grid"] = {{"window", to_json(grid.window)}, {"spacing", grid.spacing}, {"nx", comp.field.nx},
               {"ny", comp.field.ny}};
  r["no_escape_nodes"] = no_escape;
  r["component_nodes"] = comp.nodes.size();
  return r;
}

json trace_leaf_cmd(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("trace_leaf");
  const Point x = point_flag(fl.x, s, "x", {0.0, 1.0});
  TraceOptions t = trace_options(s);
  if (fl.k) t.k = *fl.k;
  if (fl.n_max) t.n_max = *fl.n_max;
  if (fl.step) t.step = *fl.step;
  const Stability st = parse_stability(setting<std::string>(s, "stability", fl.stability));
  validate_pairing(ctx.metric, ctx.map);
  const LeafCurve leaf = trace_leaf(ctx.metric, ctx.map, x, st, t);
  std::ostringstream csv, svg;
  write_polyline_csv(csv, leaf.polyline);
  write_svg_layers(svg, leaf.window, {{leaf.polyline.vertices(), st == Stability::Stable ? "blue" : "red"},
                                      {{x}, "black", true}});
  json side = ctx.report("trace-leaf");
  side["base"] = to_json(x);
  side["stability"] = to_string(st);
  side["vertices"] = leaf.polyline.size();
  side["base_index"] = leaf.base_index;
  side["window"] = to_json(leaf.window);
  side["truncation"] = to_json(leaf.truncation);
  side["membership_ratio"] = leaf_membership_ratio(ctx.metric, ctx.map, leaf);
  ctx.write("leaf.csv", csv.str());
  ctx.write("leaf.json", side.dump(2) + "\n");
  ctx.write("leaf.svg", svg.str());
  return side;
}

json hp_scan_cmd(const Context& ctx, const Flags&) {
  const json& s = ctx.section("hp_scan");
  HPScanConfig cfg;
  cfg.sample = unit_square_sample(setting(s, "sample_nodes", 5));
  cfg.radii = setting<std::vector<double>>(s, "radii", {10.0, 20.0, 40.0, 80.0});
  const std::string notion = setting<std::string>(s, "notion", "MetricU");
  if (notion == "Euclidean") cfg.notion = RadiusNotion::Euclidean;
  else if (notion != "MetricU") throw UsageError("notion must be Euclidean or MetricU");
  cfg.directions = setting(s, "directions", cfg.directions);
  cfg.angle_start = setting(s, "angle_start", cfg.angle_start);
  cfg.angle_span = setting(s, "angle_span", cfg.angle_span);
  cfg.pair_budget = setting<std::size_t>(s, "pair_budget", 0);
  cfg.seed = ctx.seed;
  validate_pairing(ctx.metric, ctx.map);
  const HPScanReport rep = hp_scan(ctx.metric, ctx.map, cfg);
  std::ostringstream csv, svg;
  write_hp_csv(csv, rep);
  write_svg_decay(svg, rep);
  json r = ctx.report("hp-scan");
  r["notion"] = notion;
  r["threshold"] = kHPThreshold;
  r["scan"] = to_json(rep);
  r["verdict"] = to_string(rep.verdict);
  ctx.write("hp_scan.csv", csv.str());
  ctx.write("hp_scan.json", r.dump(2) + "\n");
  ctx.write("hp_decay.svg", svg.str());
  if (rep.verdict != HPVerdict::Decaying) throw Violation{"NotDecaying", r};
  return r;
}

json points_json(const std::vector<Point>& pts) {
  json a = json::array();
  for (Point p : pts) a.push_back(to_json(p));
  return a;
}

json domain_cmd(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("domain");
  const Point seed = point_flag(fl.x, s, "seed", {0.0, 1.0});
  const TraceOptions t = trace_options(s);
  const Box cover = s.contains("coverage_box") ? box_from_json(s.at("coverage_box")) : Box::square(10.0);
  const int nodes = setting(s, "coverage_nodes", 41);
  const int budget = setting(s, "orbit_budget", 64);
  const Stability st = parse_stability(setting<std::string>(s, "stability", fl.stability));
  validate_pairing(ctx.metric, ctx.map);

  const LeafCurve leaf = trace_leaf(ctx.metric, ctx.map, seed, st, t);
  json r = ctx.report("domain");
  r["seed"] = to_json(seed);
  r["stability"] = to_string(st);
  r["separation"] = to_json(separation_trichotomy(leaf, ctx.map));
  const FundamentalDomain dom = build_fundamental_domain(leaf, ctx.map);
  r["domain_window"] = to_json(dom.window);
  std::vector<Point> missing;
  std::ostringstream csv;
  csv << "x1,x2,n\n";
  for (Point p : grid_points(cover, nodes)) {
    const auto n = orbit_union_membership(dom, ctx.map, p, budget);
    if (!n) missing.push_back(p);
    csv << format_double(p.x1) << ',' << format_double(p.x2) << ',' << (n ? std::to_string(*n) : "NotCovered")
        << '\n';
  }
  r["coverage"] = {{"box", to_json(cover)},
                   {"nodes", nodes * nodes},
                   {"not_covered", missing.size()},
                   {"witnesses", points_json(missing)}};
  std::ostringstream svg;
  write_svg_layers(svg, dom.window,
                   {{dom.lower.polyline.vertices(), "blue"}, {dom.upper.vertices(), "green"}, {missing, "red", true}});
  ctx.write("coverage.csv", csv.str());
  ctx.write("domain.svg", svg.str());
  ctx.write("domain.json", r.dump(2) + "\n");
  return r;
}

json conjugacy_cmd(const Context& ctx, const Flags& fl) {
  const json& s = ctx.section("conjugacy");
  PipelineOptions opts;
  opts.seed = point_flag(fl.x, s, "seed", opts.seed);
  opts.trace = trace_options(s);
  if (s.contains("transversal")) {
    std::vector<Point> tv;
    for (const json& p : s.at("transversal")) tv.push_back(point_from_json(p));
    opts.transversal = Polyline(std::move(tv));
  }
  opts.limit_budget = setting(s, "limit_budget", opts.limit_budget);
  opts.orbit_budget = setting(s, "orbit_budget", opts.orbit_budget);
  if (s.contains("coverage_box")) opts.coverage_box = box_from_json(s.at("coverage_box"));
  opts.coverage_nodes = setting(s, "coverage_nodes", opts.coverage_nodes);
  const Box sample_box = s.contains("sample_box") ? box_from_json(s.at("sample_box")) : Box::square(5.0);
  const int sample_nodes = setting(s, "sample_nodes", 21);
  const double tolerance = setting(s, "residual_tolerance", 1e-6);
  validate_pairing(ctx.metric, ctx.map);

  // A metric/map pair without both signs of V is not a Lyapunov pairing.
  json r = ctx.report("conjugacy");
  r["pairing_probe"] = to_json(sphere_sign_probe(ctx.metric, ctx.map, opts.seed, opts.trace.k));

  const PipelineResult res = translation_pipeline(ctx.metric, ctx.map, opts);
  r["stable_separation"] = to_json(res.stable_separation);
  r["stable_not_covered"] = points_json(res.stable_not_covered);
  r["switched"] = res.switched;
  if (res.limit) {
    r["limit_leaf"] = {{"point", to_json(res.limit->limit)},
                       {"iterations", res.limit->iterations},
                       {"invariance_1", res.limit_invariance_1},
                       {"invariance_2", res.limit_invariance_2}};
  }
  r["final_not_covered"] = points_json(res.final_not_covered);

  const auto samples = grid_points(sample_box, sample_nodes);
  const ResidualStats stats = conjugacy_residual(*res.chart, ctx.map, samples);
  const bool injective = chart_injective(*res.chart, samples);
  r["residual"] = to_json(stats);
  r["residual_tolerance"] = tolerance;
  r["injective"] = injective;

  std::ostringstream csv;
  csv << "p1,p2,h1,h2\n";
  for (Point p : samples) {
    const auto h = (*res.chart)(p);
    if (!h) continue;
    csv << format_double(p.x1) << ',' << format_double(p.x2) << ',' << format_double(h->x1) << ','
        << format_double(h->x2) << '\n';
  }
  std::vector<SvgLayer> layers{{res.domain->lower.polyline.vertices(), "blue"},
                               {res.domain->upper.vertices(), "green"}};
  if (res.limit) layers.push_back({res.limit->leaf.polyline.vertices(), "orange"});
  layers.push_back({res.final_not_covered, "red", true});
  std::ostringstream svg;
  write_svg_layers(svg, Box::square(12.0), layers);
  ctx.write("chart.csv", csv.str());
  ctx.write("conjugacy.json", r.dump(2) + "\n");
  ctx.write("conjugacy.svg", svg.str());

  const bool ok = res.final_not_covered.empty() && stats.not_covered.empty() && stats.max <= tolerance && injective;
  if (!ok) throw Violation{"ConjugacyFailed", r};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planedyn: Lyapunov metrics and invariant foliations of plane homeomorphisms"};
  app.require_subcommand(1);
  Flags fl;

  struct Command {
    const char* name;
    const char* help;
    json (*run)(const Context&, const Flags&);
  };
  const std::vector<Command> commands{
      {"metric-eval", "Ds, Du, U on seeded random pairs (CSV) and the scaling check", metric_eval},
      {"axiom-scan", "symmetry, identity and triangle-inequality scan", axiom_scan},
      {"sign-probe", "witnesses of both signs of V on the U-sphere about x", sign_probe},
      {"expansive-cert", "least n with U(f^n x, f^n y) > k and the growth bound", expansive_cert},
      {"stable-set", "escape-time field and k-stable component (CSV + SVG)", stable_set},
      {"trace-leaf", "stable or unstable leaf through x (CSV + JSON + SVG)", trace_leaf_cmd},
      {"hp-scan", "decay of |V(x,y) - V(x,z)| / W(x,y) with the radius (JSON + CSV + SVG)", hp_scan_cmd},
      {"domain", "separation trichotomy, fundamental domain and orbit coverage", domain_cmd},
      {"conjugacy", "two-stage chart to the unit translation and its residuals", conjugacy_cmd},
  };

  const Command* chosen = nullptr;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("-c,--config", fl.config, "JSON config with map and metric specs")->required();
    sub->add_option("-o,--out", fl.out, "output directory (default: config output_dir or planedyn_out)");
    sub->add_option("--seed", fl.seed, "overrides the config seed");
    sub->add_option("--x", fl.x, "base point x1,x2");
    if (std::string(c.name) == "expansive-cert") sub->add_option("--y", fl.y, "second point x1,x2");
    sub->add_option("--k", fl.k, "U-distance threshold");
    sub->add_option("--n-max", fl.n_max, "iteration horizon");
    sub->add_option("--count", fl.count, "number of random pairs or points");
    sub->add_option("--step", fl.step, "leaf step or grid spacing");
    sub->add_option("--stability", fl.stability, "stable or unstable")
        ->check(CLI::IsMember({"stable", "unstable"}));
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::optional<Context> ctx;
  try {
    ctx = load(fl.config, fl.out, fl.seed);
    const json r = chosen->run(*ctx, fl);
    std::cout << r.dump(2) << '\n';
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Violation& v) {
    json r = v.report;
    r["verdict"] = v.verdict;
    std::cout << r.dump(2) << '\n';
    std::cerr << "contract violation: " << v.verdict << '\n';
    return 2;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::NonFinite) {
      std::cerr << "usage error: " << e.what() << '\n';
      return 1;
    }
    json r{{"command", chosen->name}, {"verdict", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (ctx) r["config_hash"] = ctx->hash;
    std::cout << r.dump(2) << '\n';
    std::cerr << "contract violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
