#pragma once

#include <cmath>

namespace planedyn::detail {

inline const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

// Golden-section minimization on [a, b]. The retained interior point keeps
// the rounding error of the scale it was created at, so both points are
// recomputed whenever they fall out of order. `stop(best)` ends early.
template <typename F, typename Stop>
double golden_min(F&& f, double a, double b, int max_iter, Stop&& stop, double* width = nullptr) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (stop(fc < fd ? c : d) || !(b > a)) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      if (!(a <= c && c < d && d <= b)) {
        d = a + kGolden * (b - a);
        fd = f(d);
      }
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      if (!(a <= c && c < d && d <= b)) {
        c = b - kGolden * (b - a);
        fc = f(c);
      }
      fd = f(d);
    }
    if (!(c < d)) break;
  }
  if (width) *width = b - a;
  return fc < fd ? c : d;
}

template <typename F>
double golden_min(F&& f, double a, double b, int max_iter) {
  return golden_min(f, a, b, max_iter, [](double) { return false; });
}

}  // namespace planedyn::detail
