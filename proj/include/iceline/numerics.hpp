#pragma once

/* Scalar root bracketing and adaptive quadrature used across the library. */

#include <functional>

namespace iceline::numerics {

struct RootOptions {
  double f_tol = 0.0;     // stop once |f| <= f_tol (0: iterate to t_tol)
  double t_tol = 0.0;     // absolute interval tolerance (0: ~4 ulp)
  int max_iter = 200;
};

// Brent's method (bisection + secant/inverse quadratic interpolation) on a
// bracketing interval [a, b] with f(a)*f(b) <= 0. Returns the abscissa.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  RootOptions opts = {});

// As above but with already-known endpoint values (saves two evaluations).
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, RootOptions opts = {});

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// 15-point Gauss-Kronrod rule on [a, b]; error_estimate is |K15 - G7|.
QuadratureResult gauss_kronrod_15(const std::function<double(double)>& f,
                                  double a, double b);

// Globally adaptive Gauss-Kronrod refinement to absolute accuracy abs_tol.
// split_points are forced panel boundaries (values outside (a,b) ignored).
// Throws AccuracyError with the achieved estimate if max_panels is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol,
                          std::initializer_list<double> split_points = {},
                          int max_panels = 1'000'000);

}  // namespace iceline::numerics
