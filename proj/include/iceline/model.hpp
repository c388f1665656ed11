#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <string>

#include "iceline/filippov.hpp"

namespace iceline {

enum class Stability { Stable, Unstable, Degenerate };

// Linearization report at the interior rest point (A_c, eta_c).
struct EquilibriumReport {
  double A_c = 0.0;
  double eta_c = 0.0;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  Eigen::Vector2cd eigenvalues = Eigen::Vector2cd::Zero();
  Stability stability = Stability::Degenerate;
};

// A concrete energy-balance model packaged as a planar Filippov field in
// (A, eta) together with the pieces the analysis layer needs.
struct IceLineModel {
  std::string name;
  filippov::SmoothField field;
  double rho = 1.0;
  double delta = 0.0;
  double eta_c = 0.0;
  // A on the ice-line nullcline h(A, eta) = 0 as a function of eta.
  std::function<double(double)> nullcline_A;
  // Partials of the ice-line rate at a point, for the Jacobian.
  std::function<double(double, double)> dh_dA;
  std::function<double(double, double)> dh_deta;
};

// Classifies the rest point from its Jacobian.  Eigenvalues with
// |Re| < re_tol, or an ice-line position outside the open strip, yield
// Degenerate.
EquilibriumReport equilibrium_from_jacobian(double A_c, double eta_c,
                                            const Eigen::Matrix2d& jacobian,
                                            double re_tol = 1e-9);

}  // namespace iceline
