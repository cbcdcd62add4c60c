#pragma once

// Small numerical kernels shared by the posterior and calibration code:
// adaptive Gauss-Kronrod integration and monotone root bracketing.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "pipefair/error.hpp"

namespace pipefair::numerics {

inline constexpr double kQuadratureRelTol = 1e-12;
inline constexpr unsigned kQuadratureMaxDepth = 20;

// Adaptive 15-point Gauss-Kronrod over a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = kQuadratureRelTol) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, kQuadratureMaxDepth, rel_tol, &error);
}

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int evaluations = 0;
};

// Solves f(x) = 0 for a strictly increasing f. Expands a bracket
// geometrically around `seed` (step 1, doubled each time), then bisects until
// |f(x)| <= tol. Throws NumericalError if no sign change is found within
// `max_doublings` expansions or if bisection stalls above the tolerance.
template <class F>
RootResult solve_increasing(F&& f, double seed, double tol, int max_doublings = 200) {
  RootResult best;
  int evals = 0;
  auto eval = [&](double x) {
    const double v = f(x);
    ++evals;
    if (std::isnan(v)) {
      throw NumericalError("objective returned NaN at x = " + std::to_string(x));
    }
    return v;
  };

  double f0 = eval(seed);
  if (std::abs(f0) <= tol) return {seed, f0, evals};

  double lo = seed;
  double hi = seed;
  double flo = f0;
  double fhi = f0;
  double step = 1.0;
  int doublings = 0;
  if (f0 < 0.0) {
    while (fhi < 0.0) {
      if (doublings++ >= max_doublings) {
        throw NumericalError("failed to bracket root above " + std::to_string(seed));
      }
      lo = hi;
      flo = fhi;
      hi = seed + step;
      fhi = eval(hi);
      step *= 2.0;
    }
  } else {
    while (flo > 0.0) {
      if (doublings++ >= max_doublings) {
        throw NumericalError("failed to bracket root below " + std::to_string(seed));
      }
      hi = lo;
      fhi = flo;
      lo = seed - step;
      flo = eval(lo);
      step *= 2.0;
    }
  }

  best = std::abs(flo) < std::abs(fhi) ? RootResult{lo, flo, 0} : RootResult{hi, fhi, 0};
  while (std::abs(best.residual) > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      throw NumericalError("bisection stalled with residual " + std::to_string(best.residual));
    }
    const double fm = eval(mid);
    if (std::abs(fm) < std::abs(best.residual)) best = {mid, fm, 0};
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  best.evaluations = evals;
  return best;
}

}  // namespace pipefair::numerics
