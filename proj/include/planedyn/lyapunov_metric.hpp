#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "planedyn/geometry.hpp"
#include "planedyn/path_optimizer.hpp"
#include "planedyn/plane_map.hpp"

namespace planedyn {

/// Construction of the translation-adapted metric and its relatives.
///
///  - PaperLiteral (A): both components are numeric path infima of the
///    weighted integrals. The unstable infimum collapses towards 0 as the
///    detour bound grows; kept to exhibit that.
///  - StripRestricted (B): paths confined to the vertical strip between p1
///    and q1, which gives Du = lambda^{min(p1,q1)} |p2 - q2|.
///  - ExactForm (C, default): Ds = |psi(p) - psi(q)|, Du = |phi(p) - phi(q)|
///    with psi(x) = lambda^{-x1}/ln(lambda) and phi(x) = lambda^{x1} x2.
///  - EuclideanSplit (D): Ds = |p2 - q2|, Du = |p1 - q1|, for diag(lambda, 1/lambda).
///  - Conjugated (E): L(p, q) = base(H(p), H(q)).
enum class MetricMode { PaperLiteral, StripRestricted, ExactForm, EuclideanSplit, Conjugated };

const char* to_string(MetricMode mode);
/// "A".."E"
char mode_letter(MetricMode mode);

struct Components {
  double ds = 0.0;
  double du = 0.0;
  double u = 0.0;
};

class LyapunovMetric {
 public:
  static LyapunovMetric exact_form(double lambda);
  static LyapunovMetric strip_restricted(double lambda);
  static LyapunovMetric paper_literal(double lambda, PathFamily family);
  static LyapunovMetric euclidean_split(double lambda);
  static LyapunovMetric conjugated(PlaneMap conjugator, LyapunovMetric base);

  /// Raises Overflow when a component leaves the representable range.
  Components components(Point p, Point q) const;
  double operator()(Point p, Point q) const { return components(p, q).u; }

  MetricMode mode() const { return impl_->mode; }
  double lambda() const { return impl_->lambda; }
  const PathFamily& family() const { return impl_->family; }
  const PlaneMap* conjugator() const { return impl_->conjugator ? &*impl_->conjugator : nullptr; }
  const LyapunovMetric* base() const { return impl_->base.get(); }

 private:
  struct Impl {
    MetricMode mode = MetricMode::ExactForm;
    double lambda = 2.0;
    PathFamily family;
    std::optional<PlaneMap> conjugator;
    std::shared_ptr<const LyapunovMetric> base;
  };
  explicit LyapunovMetric(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Rejects pairings the metric constructions are not defined for (mode D
/// requires a LinearHyperbolic map).
void validate_pairing(const LyapunovMetric& metric, const PlaneMap& map);

inline constexpr double kRelativeFloor = 1e-12;

struct ScalingDeviation {
  double stable = 0.0;
  double unstable = 0.0;
};

/// Max relative deviation of Ds(fp, fq) = Ds(p, q)/lambda and
/// Du(fp, fq) = lambda Du(p, q) over the pairs.
ScalingDeviation scaling_check(const LyapunovMetric& metric, const PlaneMap& map,
                               std::span<const std::pair<Point, Point>> pairs);

struct AxiomReport {
  double symmetry_deviation = 0.0;
  double identity_deviation = 0.0;
  long triangle_violations = 0;
  /// First violating ordered triple (p, q, r) with U(p,r) > U(p,q) + U(q,r) + 1e-9.
  std::optional<std::array<Point, 3>> witness;
};

AxiomReport metric_axiom_scan(const LyapunovMetric& metric, std::span<const Point> sample);

}  // namespace planedyn
