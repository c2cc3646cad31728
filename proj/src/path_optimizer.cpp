#include "planedyn/path_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "planedyn/error.hpp"

namespace planedyn {

namespace {

// Average of lambda^{sigma x} over x in [a, a + delta].
double mean_weight(double sigma, double log_lambda, double a, double delta) {
  const double base = std::exp(sigma * a * log_lambda);
  const double z = sigma * delta * log_lambda;
  if (std::abs(z) < 1e-12) return base * (1.0 + 0.5 * z);
  return base * std::expm1(z) / z;
}

}  // namespace

double path_cost(Weight weight, double lambda, std::span<const Point> path) {
  if (!(lambda > 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must exceed 1");
  const double log_lambda = std::log(lambda);
  const double sigma = weight == Weight::Stable ? -1.0 : 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path[i];
    const Point b = path[i + 1];
    const double moved = weight == Weight::Stable ? std::abs(b.x1 - a.x1) : std::abs(b.x2 - a.x2);
    if (moved == 0.0) continue;
    total += moved * mean_weight(sigma, log_lambda, a.x1, b.x1 - a.x1);
  }
  if (!std::isfinite(total) || total > 1e300) throw Error(ErrorKind::Overflow, "path cost overflow");
  return total;
}

PathSearchResult path_infimum_numeric(Weight weight, double lambda, Point p, Point q, const PathFamily& family) {
  if (family.control_points < 2) throw Error(ErrorKind::InvalidArgument, "need at least two control points");
  if (!(family.detour >= 0.0)) throw Error(ErrorKind::InvalidArgument, "detour bound must be nonnegative");
  if (family.restarts < 1 || family.evaluation_budget < family.restarts)
    throw Error(ErrorKind::InvalidArgument, "invalid restart/budget configuration");
  if (!p.finite() || !q.finite()) throw Error(ErrorKind::NonFinite, "path endpoints");

  const std::size_t n = static_cast<std::size_t>(family.control_points);
  const Box box{{std::min(p.x1, q.x1) - family.detour, std::min(p.x2, q.x2) - family.detour},
                {std::max(p.x1, q.x1) + family.detour, std::max(p.x2, q.x2) + family.detour}};

  PathSearchResult best;
  best.cost = std::numeric_limits<double>::infinity();
  if (p == q || n == 2) {
    best.path = {p, q};
    best.cost = p == q ? 0.0 : path_cost(weight, lambda, best.path);
    best.evaluations = 1;
    best.converged_restarts = family.restarts;
    return best;
  }

  std::mt19937_64 rng(family.seed);
  std::uniform_real_distribution<double> ux(box.lo.x1, std::nextafter(box.hi.x1, box.hi.x1 + 1.0));
  std::uniform_real_distribution<double> uy(box.lo.x2, std::nextafter(box.hi.x2, box.hi.x2 + 1.0));
  const long per_restart = family.evaluation_budget / family.restarts;
  const double extent = std::max(box.width(), box.height());
  const double min_step = 1e-11 * (1.0 + extent);

  for (int r = 0; r < family.restarts; ++r) {
    std::vector<Point> path(n);
    path.front() = p;
    path.back() = q;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (r == 0) {
        path[i] = lerp(p, q, static_cast<double>(i) / static_cast<double>(n - 1));
      } else {
        path[i] = {ux(rng), uy(rng)};
      }
    }

    long evals = 0;
    double cost = path_cost(weight, lambda, path);
    ++evals;
    double step = 0.25 * extent;
    bool converged = false;
    while (evals < per_restart) {
      if (step < min_step) {
        converged = true;
        break;
      }
      bool improved = false;
      for (std::size_t i = 1; i + 1 < n && evals < per_restart; ++i) {
        for (int axis = 0; axis < 2 && evals < per_restart; ++axis) {
          const double lo = axis == 0 ? box.lo.x1 : box.lo.x2;
          const double hi = axis == 0 ? box.hi.x1 : box.hi.x2;
          if (hi <= lo) continue;
          double& coord = axis == 0 ? path[i].x1 : path[i].x2;
          const double original = coord;
          for (double dir : {1.0, -1.0}) {
            const double trial = std::clamp(original + dir * step, lo, hi);
            if (trial == original) continue;
            coord = trial;
            const double c = path_cost(weight, lambda, path);
            ++evals;
            if (c < cost) {
              cost = c;
              improved = true;
              break;
            }
            coord = original;
            if (evals >= per_restart) break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }

    best.evaluations += evals;
    if (converged) ++best.converged_restarts;
    if (cost < best.cost) {
      best.cost = cost;
      best.path = path;
    }
  }

  if (best.converged_restarts == 0)
    throw Error(ErrorKind::BudgetExceeded, "coordinate descent did not stabilize within the evaluation budget");
  return best;
}

}  // namespace planedyn
