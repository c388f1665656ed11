#include "iceline/budyko.hpp"

#include <algorithm>
#include <cmath>

#include "iceline/errors.hpp"
#include "iceline/numerics.hpp"

namespace iceline::budyko {

namespace {
// Fitted ice-line cubic: h = rho*(k0 + k1*eta + k2*eta^2 + k3*eta^3 - A/kB).
constexpr double k0 = 112.88, k1 = 56.91, k2 = -24.31, k3 = -11.05;
constexpr double kB = 1.5;
}  // namespace

void BudykoParams::validate() const {
  if (!(Q > 0.0 && B > 0.0 && C > 0.0 && rho > 0.0 && delta > 0.0))
    throw PreconditionError("BudykoParams: Q, B, C, rho, delta must be positive");
  if (!(0.0 <= alpha1 && alpha1 < alpha2 && alpha2 <= 1.0))
    throw PreconditionError("BudykoParams: need 0 <= alpha1 < alpha2 <= 1");
}

double insolation(double y, double s2) { return 1.0 + s2 * 0.5 * (3.0 * y * y - 1.0); }

double insolation_mean(double eta, double s2) {
  return eta + s2 * 0.5 * (eta * eta * eta - eta);
}

double albedo(double eta, double y, double alpha1, double alpha2) {
  if (y < eta) return alpha1;
  if (y > eta) return alpha2;
  return 0.5 * (alpha1 + alpha2);
}

double alpha_bar(double eta, const BudykoParams& p, bool* clamped) {
  const double e = std::clamp(eta, 0.0, 1.0);
  if (clamped) *clamped = (e != eta);
  const double S = insolation_mean(e, p.s2);
  return p.alpha1 * S + p.alpha2 * (1.0 - S);
}

double alpha_bar(double eta, bool* clamped) {
  return alpha_bar(eta, BudykoParams{}, clamped);
}

double h_poly(double A, double eta, double rho) {
  return rho * (k0 + eta * (k1 + eta * (k2 + eta * k3)) - A / kB);
}

double h_constructed(double A, double eta, const BudykoParams& p) {
  const double s = insolation(eta, p.s2);
  const double a_line = albedo(eta, eta, p.alpha1, p.alpha2);
  const double abar = alpha_bar(eta, p);
  return p.rho * (p.Q / (p.B + p.C) *
                      (s * (1.0 - a_line) + (p.C / p.B) * (1.0 - abar)) -
                  A / p.B - p.Tc);
}

double g(double /*A*/, double eta, const BudykoParams& p) {
  return p.delta * (eta - p.eta_c);
}

double nullcline_A(double eta) {
  return kB * (k0 + eta * (k1 + eta * (k2 + eta * k3)));
}

double dh_deta(double eta, double rho) {
  return rho * (k1 + eta * (2.0 * k2 + eta * 3.0 * k3));
}

double fold(double c1, double c2, double c3) {
  const auto dA = [&](double e) { return c1 + e * (2.0 * c2 + e * 3.0 * c3); };
  const double lo = dA(0.0), hi = dA(1.0);
  if (lo == 0.0) return 0.0;
  if (hi == 0.0) return 1.0;
  if ((lo > 0.0) == (hi > 0.0))
    throw NoFoldError("fold: nullcline slope has no sign change in (0,1)");
  numerics::RootOptions opt;
  opt.t_tol = 1e-12;
  return numerics::brent_root(dA, 0.0, 1.0, opt);
}

double fold() { return fold(k1, k2, k3); }

EquilibriumReport equilibrium(const BudykoParams& p) {
  p.validate();
  const double A_c = nullcline_A(p.eta_c);
  Eigen::Matrix2d J;
  J << 0.0, p.delta,                       // d(g)/d(A, eta)
      -p.rho / kB, dh_deta(p.eta_c, p.rho);  // d(h)/d(A, eta)
  return equilibrium_from_jacobian(A_c, p.eta_c, J);
}

filippov::SmoothField as_ice_line_model(const BudykoParams& p) {
  p.validate();
  filippov::SmoothField f;
  f.G = [p](double A, double eta) { return g(A, eta, p); };
  f.H = [rho = p.rho](double A, double eta) { return h_poly(A, eta, rho); };
  f.lipschitz_hint = p.rho * std::hypot(1.0 / kB, k1) + p.delta;
  return f;
}

IceLineModel make_model(const BudykoParams& p) {
  IceLineModel m;
  m.name = "budyko";
  m.field = as_ice_line_model(p);
  m.rho = p.rho;
  m.delta = p.delta;
  m.eta_c = p.eta_c;
  m.nullcline_A = [](double eta) { return nullcline_A(eta); };
  m.dh_dA = [rho = p.rho](double, double) { return -rho / kB; };
  m.dh_deta = [rho = p.rho](double, double eta) { return dh_deta(eta, rho); };
  return m;
}

}  // namespace iceline::budyko
