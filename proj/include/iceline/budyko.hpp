#pragma once

#include "iceline/model.hpp"

// Energy-balance model with a two-value surface albedo switching at the ice
// line.  State is (A, eta): greenhouse-gas forcing and ice-line latitude
// (as sine of latitude).  The ice-line rate used everywhere is the fitted
// cubic `h_poly`; `h_constructed` rebuilds the same rate from the underlying
// temperature profile as a diagnostic.

namespace iceline::budyko {

struct BudykoParams {
  double Q = 321.0;     // solar constant, W/m^2
  double s2 = -0.482;   // second Legendre coefficient of insolation
  double B = 1.5;       // outgoing-radiation temperature slope, W/m^2/K
  double C = 3.75;      // heat-transport coupling, W/m^2/K
  double alpha1 = 0.32; // ice-free albedo
  double alpha2 = 0.62; // ice-covered albedo
  double Tc = -10.0;    // ice-formation temperature, degC
  double rho = 1.0;     // ice-line relaxation rate
  double delta = 0.2;   // greenhouse relaxation rate
  double eta_c = 0.85;  // volcanism/weathering balance point

  void validate() const;  // throws PreconditionError on a bad combination
};

// Latitude profile of mean annual insolation, normalized to mean 1.
double insolation(double y, double s2 = -0.482);

// Antiderivative of insolation from 0 to eta.
double insolation_mean(double eta, double s2 = -0.482);

// Two-value albedo with midpoint value exactly at the ice line.
double albedo(double eta, double y, double alpha1 = 0.32, double alpha2 = 0.62);

// Insolation-weighted mean albedo; smooth in eta.  Arguments outside [0,1]
// are clamped (and flagged) because the step-albedo integral is only defined
// on the strip.
double alpha_bar(double eta, bool* clamped = nullptr);
double alpha_bar(double eta, const BudykoParams& p, bool* clamped = nullptr);

// Ice-line rate, fitted cubic form (canonical).
double h_poly(double A, double eta, double rho);

// Ice-line rate assembled from the temperature profile (diagnostic).
double h_constructed(double A, double eta, const BudykoParams& p);

// Greenhouse-gas rate: relaxation of eta toward eta_c at rate delta.
double g(double A, double eta, const BudykoParams& p);

// A solving h_poly(A, eta, rho) = 0; independent of rho.
double nullcline_A(double eta);

// d(h_poly)/d(eta) at fixed A.
double dh_deta(double eta, double rho);

// Fold of the ice-line nullcline: the unique critical point of nullcline_A
// in (0,1), located to 1e-12.
double fold();

// Fold for a generic cubic nullcline A(eta) = c0+c1*eta+c2*eta^2+c3*eta^3;
// throws NoFoldError when A'(eta) has no sign change in (0,1).
double fold(double c1, double c2, double c3);

// Rest point (A_c, eta_c) with analytic Jacobian and eigenvalue stability.
EquilibriumReport equilibrium(const BudykoParams& p);

// The model packaged as a planar Filippov field with x=A, y=eta.
filippov::SmoothField as_ice_line_model(const BudykoParams& p);

// Full handle for the analysis layer.
IceLineModel make_model(const BudykoParams& p);

}  // namespace iceline::budyko
