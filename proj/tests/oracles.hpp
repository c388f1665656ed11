#pragma once

// Independent reference implementations used to check derived numbers.
// Deliberately naive: fixed-grid Simpson instead of Gauss-Kronrod, the
// quadratic formula instead of iteration, Eigen's general eigensolver
// instead of the 2x2 closed form, and a dense least-squares fit.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using Real1D = std::function<double(double)>;

// Composite Simpson on a fixed grid (panels forced even).
inline double composite_simpson(const Real1D& f, double a, double b,
                                int panels = 100000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

namespace detail {
inline double adaptive_simpson_rec(const Real1D& f, double a, double b,
                                   double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const Real1D& f, double a, double b,
                               double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol,
                                      max_depth);
}

// Real roots of a*x^2 + b*x + c, numerically stable variant.
inline std::vector<double> quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-b / (2.0 * a)};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  return {q / a, c / q};
}

inline Eigen::Vector2cd eigenvalues_2x2(const Eigen::Matrix2d& m) {
  return Eigen::EigenSolver<Eigen::Matrix2d>(m, false).eigenvalues();
}

// Least-squares polynomial fit: coefficients low degree first.
inline Eigen::VectorXd polyfit(const std::vector<double>& x,
                               const std::vector<double>& y, int degree) {
  Eigen::MatrixXd V(x.size(), degree + 1);
  Eigen::VectorXd rhs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      V(i, j) = p;
      p *= x[i];
    }
    rhs(i) = y[i];
  }
  return V.colPivHouseholderQr().solve(rhs);
}

}  // namespace oracles
