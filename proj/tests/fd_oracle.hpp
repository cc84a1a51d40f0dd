#ifndef FBLF_TESTS_FD_ORACLE_HPP
#define FBLF_TESTS_FD_ORACLE_HPP

// Finite-difference oracles for barrier derivatives. Steps shrink with the
// distance to either end of the domain so the stencil never leaves it.

#include <algorithm>
#include <cmath>
#include <functional>

namespace fblf::testing {

using ScalarFn = std::function<double(double)>;

/// Three-point central difference, h = 1e-5 * min(V, b - V).
inline double central_d1(const ScalarFn& f, double v, double bound) {
  const double h = 1e-5 * std::min(v, bound - v);
  return (f(v + h) - f(v - h)) / (2.0 * h);
}

/// Five-point central second difference, h = min(1e-2 (b - V), 0.4 V). The
/// only singularity is at b, so a step near V = 0 need not shrink with V.
inline double central_d2(const ScalarFn& f, double v, double bound) {
  const double h = std::min(1e-2 * (bound - v), 0.4 * v);
  return (-f(v + 2 * h) + 16 * f(v + h) - 30 * f(v) + 16 * f(v - h) - f(v - 2 * h)) /
         (12 * h * h);
}

/// Same stencils with a fixed step, for formulas that extend past V = 0.
inline double central_d1_step(const ScalarFn& f, double v, double h) {
  return (f(v + h) - f(v - h)) / (2.0 * h);
}

inline double central_d2_step(const ScalarFn& f, double v, double h) {
  return (-f(v + 2 * h) + 16 * f(v + h) - 30 * f(v) + 16 * f(v - h) - f(v - 2 * h)) /
         (12 * h * h);
}

inline double relative_error(double actual, double expected) {
  return std::abs(actual - expected) / std::abs(expected);
}

}  // namespace fblf::testing

#endif  // FBLF_TESTS_FD_ORACLE_HPP
