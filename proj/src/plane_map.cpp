#include "planedyn/plane_map.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "planedyn/error.hpp"

namespace planedyn {

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Translation: return "Translation";
    case MapKind::LinearHyperbolic: return "LinearHyperbolic";
    case MapKind::ExplicitPair: return "ExplicitPair";
    case MapKind::Composition: return "Composition";
    case MapKind::Conjugated: return "Conjugated";
  }
  return "?";
}

PlaneMap PlaneMap::translation(Point v) {
  if (!v.finite()) throw Error(ErrorKind::NonFinite, "translation vector");
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::Translation;
  impl->name = "translation";
  impl->forward = [v](Point p) { return p + v; };
  impl->inverse = [v](Point p) { return p - v; };
  impl->translation = v;
  return PlaneMap(std::move(impl));
}

PlaneMap PlaneMap::linear_hyperbolic(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidArgument, "linear hyperbolic map needs lambda > 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::LinearHyperbolic;
  impl->name = "linear_hyperbolic";
  impl->forward = [lambda](Point p) { return Point{lambda * p.x1, p.x2 / lambda}; };
  impl->inverse = [lambda](Point p) { return Point{p.x1 / lambda, lambda * p.x2}; };
  impl->lambda = lambda;
  return PlaneMap(std::move(impl));
}

PlaneMap PlaneMap::explicit_pair(std::string name, Evaluator forward, Evaluator inverse,
                                 bool orientation_preserving) {
  if (!forward || !inverse) throw Error(ErrorKind::InvalidArgument, "explicit map needs both evaluators");
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::ExplicitPair;
  impl->name = std::move(name);
  impl->forward = std::move(forward);
  impl->inverse = std::move(inverse);
  impl->orientation_preserving = orientation_preserving;
  return PlaneMap(std::move(impl));
}

PlaneMap PlaneMap::identity() {
  return explicit_pair("identity", [](Point p) { return p; }, [](Point p) { return p; });
}

PlaneMap PlaneMap::shear(double amplitude) {
  if (!std::isfinite(amplitude)) throw Error(ErrorKind::NonFinite, "shear amplitude");
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::ExplicitPair;
  impl->name = "shear";
  impl->forward = [amplitude](Point p) { return Point{p.x1, p.x2 + amplitude * std::sin(p.x1)}; };
  impl->inverse = [amplitude](Point p) { return Point{p.x1, p.x2 - amplitude * std::sin(p.x1)}; };
  impl->shear = amplitude;
  return PlaneMap(std::move(impl));
}

PlaneMap PlaneMap::composition(std::vector<PlaneMap> maps) {
  if (maps.empty()) throw Error(ErrorKind::InvalidArgument, "empty composition");
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::Composition;
  impl->name = "composition";
  impl->forward = [maps](Point p) {
    for (const PlaneMap& m : maps) p = m.forward(p);
    return p;
  };
  impl->inverse = [maps](Point p) {
    for (auto it = maps.rbegin(); it != maps.rend(); ++it) p = it->inverse(p);
    return p;
  };
  bool preserving = true;
  for (const PlaneMap& m : maps) preserving = preserving == m.orientation_preserving();
  impl->orientation_preserving = preserving;
  impl->parts = std::move(maps);
  return PlaneMap(std::move(impl));
}

PlaneMap PlaneMap::conjugated(PlaneMap conjugator, PlaneMap base) {
  auto impl = std::make_shared<Impl>();
  impl->kind = MapKind::Conjugated;
  impl->name = "conjugated";
  impl->forward = [h = conjugator, f = base](Point p) { return h.inverse(f.forward(h.forward(p))); };
  impl->inverse = [h = conjugator, f = base](Point p) { return h.inverse(f.inverse(h.forward(p))); };
  impl->orientation_preserving = base.orientation_preserving();
  impl->parts = {std::move(conjugator), std::move(base)};
  return PlaneMap(std::move(impl));
}

const PlaneMap* PlaneMap::conjugator() const {
  return impl_->kind == MapKind::Conjugated ? &impl_->parts[0] : nullptr;
}

const PlaneMap* PlaneMap::base() const {
  return impl_->kind == MapKind::Conjugated ? &impl_->parts[1] : nullptr;
}

void check_overflow(Point p) {
  if (!p.finite() || std::abs(p.x1) > kOverflowThreshold || std::abs(p.x2) > kOverflowThreshold)
    throw Error(ErrorKind::Overflow, "iterate left the representable range");
}

Point evaluate(const PlaneMap& map, Point p, int n, int budget) {
  if (std::abs(n) > budget)
    throw Error(ErrorKind::BudgetExceeded, "|n| = " + std::to_string(std::abs(n)) + " exceeds iteration budget");
  const int direction = n > 0 ? 1 : -1;
  for (int i = 0; i < std::abs(n); ++i) p = step(map, p, direction);
  return p;
}

OrbitSegment orbit(const PlaneMap& map, Point base, int n_min, int n_max) {
  if (n_min > 0 || n_max < 0) throw Error(ErrorKind::InvalidArgument, "orbit range must contain 0");
  OrbitSegment out{base, {}};
  std::vector<OrbitSample> backward;
  Point p = base;
  for (int n = -1; n >= n_min; --n) {
    p = step(map, p, -1);
    backward.push_back({n, p});
  }
  out.samples.assign(backward.rbegin(), backward.rend());
  out.samples.push_back({0, base});
  p = base;
  for (int n = 1; n <= n_max; ++n) {
    p = step(map, p, 1);
    out.samples.push_back({n, p});
  }
  return out;
}

double roundtrip_check(const PlaneMap& map, std::span<const Point> sample) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  double worst = 0.0;
  for (const Point& p : sample) worst = std::max(worst, distance(map.inverse(map.forward(p)), p));
  return worst;
}

std::vector<Point> grid_points(const Box& box, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  const auto count = [spacing](double extent) {
    return static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
  };
  const std::size_t nx = count(box.width());
  const std::size_t ny = count(box.height());
  std::vector<Point> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      out.push_back({box.lo.x1 + static_cast<double>(i) * spacing, box.lo.x2 + static_cast<double>(j) * spacing});
  return out;
}

std::vector<Point> grid_points(const Box& box, int nodes_per_axis) {
  if (nodes_per_axis < 2) throw Error(ErrorKind::InvalidArgument, "need at least two nodes per axis");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(nodes_per_axis) * static_cast<std::size_t>(nodes_per_axis));
  const double dx = box.width() / (nodes_per_axis - 1);
  const double dy = box.height() / (nodes_per_axis - 1);
  for (int j = 0; j < nodes_per_axis; ++j)
    for (int i = 0; i < nodes_per_axis; ++i) out.push_back({box.lo.x1 + i * dx, box.lo.x2 + j * dy});
  return out;
}

DisplacementScan fixed_point_free_scan(const PlaneMap& map, const Box& box, double resolution) {
  DisplacementScan scan{std::numeric_limits<double>::infinity(), box.lo};
  for (const Point& p : grid_points(box, resolution)) {
    const double d = distance(map.forward(p), p);
    if (d < scan.min_displacement) {
      scan.min_displacement = d;
      scan.argmin = p;
    }
  }
  return scan;
}

}  // namespace planedyn
