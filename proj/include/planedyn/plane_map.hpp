#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planedyn/geometry.hpp"

namespace planedyn {

enum class MapKind { Translation, LinearHyperbolic, ExplicitPair, Composition, Conjugated };

const char* to_string(MapKind kind);

/// Invertible self-map of the plane with declared forward and inverse
/// evaluators. Immutable; copies share the underlying definition.
class PlaneMap {
 public:
  using Evaluator = std::function<Point(Point)>;

  /// T(x) = x + v.
  static PlaneMap translation(Point v);
  /// diag(lambda, 1/lambda), lambda > 1.
  static PlaneMap linear_hyperbolic(double lambda);
  static PlaneMap explicit_pair(std::string name, Evaluator forward, Evaluator inverse,
                                bool orientation_preserving = true);
  static PlaneMap identity();
  /// H(x, y) = (x, y + a sin x), with closed-form inverse.
  static PlaneMap shear(double amplitude);
  /// Applies maps[0] first, then maps[1], ...
  static PlaneMap composition(std::vector<PlaneMap> maps);
  /// H^{-1} o base o H.
  static PlaneMap conjugated(PlaneMap conjugator, PlaneMap base);

  Point forward(Point p) const { return impl_->forward(p); }
  Point inverse(Point p) const { return impl_->inverse(p); }

  MapKind kind() const { return impl_->kind; }
  const std::string& name() const { return impl_->name; }
  /// Declared, not verified numerically.
  bool orientation_preserving() const { return impl_->orientation_preserving; }

  std::optional<Point> translation_vector() const { return impl_->translation; }
  std::optional<double> lambda() const { return impl_->lambda; }
  std::optional<double> shear_amplitude() const { return impl_->shear; }
  /// For Conjugated maps: the conjugator H and the base map.
  const PlaneMap* conjugator() const;
  const PlaneMap* base() const;
  const std::vector<PlaneMap>& parts() const { return impl_->parts; }

 private:
  struct Impl {
    MapKind kind = MapKind::ExplicitPair;
    std::string name;
    Evaluator forward;
    Evaluator inverse;
    bool orientation_preserving = true;
    std::optional<Point> translation;
    std::optional<double> lambda;
    std::optional<double> shear;
    std::vector<PlaneMap> parts;
  };
  explicit PlaneMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline constexpr int kDefaultIterationBudget = 10000;
inline constexpr double kOverflowThreshold = 1e300;

/// Raises Overflow when a coordinate is non-finite or exceeds 1e300.
void check_overflow(Point p);

/// f^n(p): forward for n > 0, inverse for n < 0, identity for n = 0.
Point evaluate(const PlaneMap& map, Point p, int n, int budget = kDefaultIterationBudget);

/// Single step in the given direction (+1 forward, -1 inverse) with the
/// overflow check applied.
inline Point step(const PlaneMap& map, Point p, int direction) {
  const Point q = direction > 0 ? map.forward(p) : map.inverse(p);
  check_overflow(q);
  return q;
}

struct OrbitSample {
  int n;
  Point point;
};

struct OrbitSegment {
  Point base;
  std::vector<OrbitSample> samples;
};

/// Samples f^n(base) for n in [n_min, n_max].
OrbitSegment orbit(const PlaneMap& map, Point base, int n_min, int n_max);

/// max |f^{-1}(f(p)) - p| over the sample.
double roundtrip_check(const PlaneMap& map, std::span<const Point> sample);

struct DisplacementScan {
  double min_displacement = 0.0;
  Point argmin;
};

/// Grid minimum of |f(p) - p|; a sampling certificate only.
DisplacementScan fixed_point_free_scan(const PlaneMap& map, const Box& box, double resolution);

/// Grid nodes lo + i*h covering the box (inclusive where the box edge lands on a node).
std::vector<Point> grid_points(const Box& box, double spacing);
std::vector<Point> grid_points(const Box& box, int nodes_per_axis);

}  // namespace planedyn
