#include "planedyn/lyapunov_metric.hpp"

#include <cmath>
#include <tuple>
#include <utility>

#include "planedyn/error.hpp"

namespace planedyn {

namespace {

double checked(double v) {
  if (!std::isfinite(v) || std::abs(v) > kOverflowThreshold)
    throw Error(ErrorKind::Overflow, "metric component left the representable range");
  return v;
}

// |lambda^{-a} - lambda^{-b}| / ln(lambda), written to avoid cancellation.
double stable_exact(double log_lambda, double a, double b) {
  const double scale = std::exp(-a * log_lambda);
  return checked(std::abs(scale * std::expm1((a - b) * log_lambda)) / log_lambda);
}

void require_lambda(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidArgument, "expansion constant lambda must exceed 1");
}

}  // namespace

const char* to_string(MetricMode mode) {
  switch (mode) {
    case MetricMode::PaperLiteral: return "PaperLiteral";
    case MetricMode::StripRestricted: return "StripRestricted";
    case MetricMode::ExactForm: return "ExactForm";
    case MetricMode::EuclideanSplit: return "EuclideanSplit";
    case MetricMode::Conjugated: return "Conjugated";
  }
  return "?";
}

char mode_letter(MetricMode mode) { return static_cast<char>('A' + static_cast<int>(mode)); }

LyapunovMetric LyapunovMetric::exact_form(double lambda) {
  require_lambda(lambda);
  return LyapunovMetric(std::make_shared<const Impl>(Impl{MetricMode::ExactForm, lambda, {}, {}, {}}));
}

LyapunovMetric LyapunovMetric::strip_restricted(double lambda) {
  require_lambda(lambda);
  return LyapunovMetric(std::make_shared<const Impl>(Impl{MetricMode::StripRestricted, lambda, {}, {}, {}}));
}

LyapunovMetric LyapunovMetric::paper_literal(double lambda, PathFamily family) {
  require_lambda(lambda);
  if (family.control_points < 2 || !(family.detour >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "path family needs N >= 2 and detour >= 0");
  return LyapunovMetric(std::make_shared<const Impl>(Impl{MetricMode::PaperLiteral, lambda, family, {}, {}}));
}

LyapunovMetric LyapunovMetric::euclidean_split(double lambda) {
  require_lambda(lambda);
  return LyapunovMetric(std::make_shared<const Impl>(Impl{MetricMode::EuclideanSplit, lambda, {}, {}, {}}));
}

LyapunovMetric LyapunovMetric::conjugated(PlaneMap conjugator, LyapunovMetric base) {
  const double lambda = base.lambda();
  return LyapunovMetric(std::make_shared<const Impl>(
      Impl{MetricMode::Conjugated, lambda, {}, std::move(conjugator), std::make_shared<const LyapunovMetric>(std::move(base))}));
}

Components LyapunovMetric::components(Point p, Point q) const {
  if (!p.finite() || !q.finite()) throw Error(ErrorKind::NonFinite, "metric arguments");
  // a fixed argument order keeps every mode bitwise symmetric
  if (std::tie(q.x1, q.x2) < std::tie(p.x1, p.x2)) std::swap(p, q);
  const Impl& m = *impl_;
  const double log_lambda = std::log(m.lambda);
  Components c;
  switch (m.mode) {
    case MetricMode::ExactForm: {
      c.ds = stable_exact(log_lambda, p.x1, q.x1);
      const double phi_p = checked(std::exp(p.x1 * log_lambda)) * p.x2;
      const double phi_q = checked(std::exp(q.x1 * log_lambda)) * q.x2;
      c.du = checked(std::abs(phi_p - phi_q));
      break;
    }
    case MetricMode::StripRestricted:
      c.ds = stable_exact(log_lambda, p.x1, q.x1);
      c.du = checked(std::exp(std::min(p.x1, q.x1) * log_lambda) * std::abs(p.x2 - q.x2));
      break;
    case MetricMode::EuclideanSplit:
      c.ds = std::abs(p.x2 - q.x2);
      c.du = std::abs(p.x1 - q.x1);
      break;
    case MetricMode::Conjugated:
      return m.base->components(m.conjugator->forward(p), m.conjugator->forward(q));
    case MetricMode::PaperLiteral:
      if (p == q) return {};
      c.ds = path_infimum_numeric(Weight::Stable, m.lambda, p, q, m.family).cost;
      c.du = path_infimum_numeric(Weight::Unstable, m.lambda, p, q, m.family).cost;
      break;
  }
  c.u = checked(c.ds + c.du);
  return c;
}

void validate_pairing(const LyapunovMetric& metric, const PlaneMap& map) {
  if (metric.mode() == MetricMode::EuclideanSplit && map.kind() != MapKind::LinearHyperbolic)
    throw Error(ErrorKind::InvalidArgument, "mode D metric is only defined for LinearHyperbolic maps");
}

ScalingDeviation scaling_check(const LyapunovMetric& metric, const PlaneMap& map,
                               std::span<const std::pair<Point, Point>> pairs) {
  const double lambda = metric.lambda();
  ScalingDeviation dev;
  for (const auto& [p, q] : pairs) {
    const Components before = metric.components(p, q);
    const Components after = metric.components(map.forward(p), map.forward(q));
    dev.stable = std::max(dev.stable,
                          std::abs(after.ds - before.ds / lambda) / std::max(before.ds, kRelativeFloor));
    dev.unstable = std::max(dev.unstable,
                            std::abs(after.du - lambda * before.du) / std::max(before.du, kRelativeFloor));
  }
  return dev;
}

AxiomReport metric_axiom_scan(const LyapunovMetric& metric, std::span<const Point> sample) {
  if (sample.size() < 3) throw Error(ErrorKind::InvalidArgument, "axiom scan needs at least three points");
  const std::size_t n = sample.size();
  std::vector<double> u(n * n);
  AxiomReport report;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) u[i * n + j] = metric(sample[i], sample[j]);
    report.identity_deviation = std::max(report.identity_deviation, std::abs(u[i * n + i]));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      report.symmetry_deviation = std::max(report.symmetry_deviation, std::abs(u[i * n + j] - u[j * n + i]));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (u[i * n + k] > u[i * n + j] + u[j * n + k] + 1e-9) {
          ++report.triangle_violations;
          if (!report.witness) report.witness = std::array<Point, 3>{sample[i], sample[j], sample[k]};
        }
      }
    }
  }
  return report;
}

}  // namespace planedyn
