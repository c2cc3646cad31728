#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "planedyn/geometry.hpp"

namespace planedyn {

/// Which component integrand: stable uses lambda^{-x1}|dx1|, unstable uses
/// lambda^{x1}|dx2|.
enum class Weight { Stable, Unstable };

/// Piecewise-linear path family searched by the numeric infimum.
struct PathFamily {
  int control_points = 6;         // including both endpoints
  double detour = 0.0;            // how far paths may leave the box spanned by p and q
  int restarts = 20;
  long evaluation_budget = 100000;
  std::uint64_t seed = 1;
};

/// Weighted length of a polygonal path, integrated exactly on each segment.
double path_cost(Weight weight, double lambda, std::span<const Point> path);

struct PathSearchResult {
  double cost = 0.0;
  std::vector<Point> path;
  long evaluations = 0;
  int converged_restarts = 0;
};

/// Upper bound on the infimum of the weighted path integral over paths with
/// the family's control-point count, restricted to the detour box. Uses
/// derivative-free coordinate descent with random restarts (restart 0 is the
/// straight segment). Raises BudgetExceeded if no restart stabilizes.
PathSearchResult path_infimum_numeric(Weight weight, double lambda, Point p, Point q, const PathFamily& family);

}  // namespace planedyn
