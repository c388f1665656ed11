#pragma once

#include "iceline/model.hpp"

// Variant of the Budyko model whose ice albedo ramps smoothly from bare-ice
// to snow-covered values across a fixed snow line, giving the ice-line rate a
// double-folded nullcline.  The mean albedo has no closed form here; the
// public alpha_bar_J integrates adaptively to 1e-10, while the packaged field
// interpolates a precomputed cumulative table of the same integral (the two
// routes agree to the quadrature tolerance; checked in the tests).

namespace iceline::jormungand {

struct JormungandParams {
  double Q = 321.0;
  double s2 = -0.482;
  double B = 1.5;
  double C = 3.75;
  double rho = 1.0;
  double delta = 0.2;
  double eta_c = 0.8;
  double Tc = 0.0;       // ice-formation temperature, degC
  double M = 25.0;       // snow-line transition steepness
  double alpha_w = 0.35; // open-water albedo
  double alpha_i = 0.45; // bare-ice albedo
  double alpha_s = 0.8;  // snow-covered-ice albedo
  double y_snow = 0.35;  // snow-line latitude

  void validate() const;  // throws PreconditionError
};

// Ice-surface albedo: ramps from bare ice to snow across y_snow.
double alpha2_J(double y, const JormungandParams& p);

// Three-branch surface albedo: open water below the ice line, ice above,
// midpoint value on it.
double albedo_J(double eta, double y, const JormungandParams& p);

// Insolation-weighted mean albedo, adaptive quadrature to 1e-10 absolute.
// eta outside [0,1] is clamped.
double alpha_bar_J(double eta, const JormungandParams& p);

// Ice-line rate assembled from the temperature profile; linear in A with
// slope -rho/B.  eta outside [0,1] is clamped.
double h_J(double A, double eta, const JormungandParams& p);

// A solving h_J(A, eta, p) = 0 at fixed eta.
double nullcline_A_J(double eta, const JormungandParams& p);

// Analytic d(h_J)/d(eta) at fixed A (the quadrature term differentiates to
// the integrand).
double dh_deta_J(double eta, const JormungandParams& p);

// The model packaged as a planar Filippov field with x=A, y=eta.
filippov::SmoothField as_ice_line_model_J(const JormungandParams& p);

// Full handle for the analysis layer.
IceLineModel make_model(const JormungandParams& p);

}  // namespace iceline::jormungand
