#pragma once

// Internal one-dimensional search helpers.

#include <cmath>
#include <utility>

namespace otl::detail {

/// Golden-section search for the minimizer of a unimodal f on [a, b].
/// Returns (argmin, min) after shrinking the bracket below tol·(1 + |x|).
template <class F>
std::pair<double, double> golden_section_min(F&& f, double a, double b, double tol = 1e-12,
                                             int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(c)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace otl::detail
