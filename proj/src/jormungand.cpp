#include "iceline/jormungand.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "iceline/budyko.hpp"
#include "iceline/errors.hpp"
#include "iceline/numerics.hpp"

namespace iceline::jormungand {

void JormungandParams::validate() const {
  if (!(Q > 0.0 && B > 0.0 && C > 0.0 && rho > 0.0 && delta > 0.0))
    throw PreconditionError(
        "JormungandParams: Q, B, C, rho, delta must be positive");
  if (!(M > 0.0))
    throw PreconditionError("JormungandParams: M must be positive");
  if (!(alpha_w < alpha_i && alpha_i < alpha_s))
    throw PreconditionError(
        "JormungandParams: need alpha_w < alpha_i < alpha_s");
}

double alpha2_J(double y, const JormungandParams& p) {
  return 0.5 * (p.alpha_s + p.alpha_i) +
         0.5 * (p.alpha_s - p.alpha_i) * std::tanh(p.M * (y - p.y_snow));
}

double albedo_J(double eta, double y, const JormungandParams& p) {
  if (y < eta) return p.alpha_w;
  if (y > eta) return alpha2_J(y, p);
  return 0.5 * (p.alpha_w + alpha2_J(eta, p));
}

namespace {

double ice_tail_integrand(double y, const JormungandParams& p) {
  return budyko::insolation(y, p.s2) * alpha2_J(y, p);
}

// Mean albedo from a given value of the tail integral over [eta, 1].
double alpha_bar_from_tail(double eta, double tail, const JormungandParams& p) {
  return p.alpha_w * budyko::insolation_mean(eta, p.s2) + tail;
}

double h_from_alpha_bar(double A, double eta, double abar,
                        const JormungandParams& p) {
  const double s = budyko::insolation(eta, p.s2);
  const double a_line = 0.5 * (p.alpha_w + alpha2_J(eta, p));
  return p.rho * (p.Q / (p.B + p.C) *
                      (s * (1.0 - a_line) + (p.C / p.B) * (1.0 - abar)) -
                  A / p.B - p.Tc);
}

// Cumulative tail integral I(y) = integral of s*alpha2 over [y, 1] on a fine
// grid, evaluated by cubic Hermite interpolation with the analytic slope
// I'(y) = -s(y)*alpha2(y).  Interpolation error is ~1e-13, far below the
// integrator tolerances; the adaptive-quadrature route stays the reference.
struct TailTable {
  int n = 8192;
  std::vector<double> val;    // I at nodes i/n
  std::vector<double> slope;  // I' at nodes

  double operator()(double y) const {
    const double u = std::clamp(y, 0.0, 1.0) * n;
    const int i = std::min(static_cast<int>(u), n - 1);
    const double t = u - i;
    const double h = 1.0 / n;
    const double t1 = 1.0 - t;
    const double h00 = (1.0 + 2.0 * t) * t1 * t1;
    const double h10 = t * t1 * t1;
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * val[i] + h10 * h * slope[i] + h01 * val[i + 1] +
           h11 * h * slope[i + 1];
  }
};

std::shared_ptr<const TailTable> build_tail_table(const JormungandParams& p) {
  auto table = std::make_shared<TailTable>();
  const int n = table->n;
  table->val.assign(n + 1, 0.0);
  table->slope.assign(n + 1, 0.0);
  const auto f = [&p](double y) { return ice_tail_integrand(y, p); };
  std::vector<double> cell(n);
  for (int i = 0; i < n; ++i)
    cell[i] =
        numerics::gauss_kronrod_15(f, i / double(n), (i + 1) / double(n)).value;
  for (int i = n - 1; i >= 0; --i) table->val[i] = table->val[i + 1] + cell[i];
  for (int i = 0; i <= n; ++i) table->slope[i] = -f(i / double(n));
  return table;
}

}  // namespace

double alpha_bar_J(double eta, const JormungandParams& p) {
  const double e = std::clamp(eta, 0.0, 1.0);
  const double tail =
      numerics::integrate_adaptive([&p](double y) { return ice_tail_integrand(y, p); },
                                   e, 1.0, 1e-10, {p.y_snow});
  return alpha_bar_from_tail(e, tail, p);
}

double h_J(double A, double eta, const JormungandParams& p) {
  const double e = std::clamp(eta, 0.0, 1.0);
  return h_from_alpha_bar(A, e, alpha_bar_J(e, p), p);
}

double nullcline_A_J(double eta, const JormungandParams& p) {
  const double e = std::clamp(eta, 0.0, 1.0);
  // h_J = rho*(T - A/B - Tc) with T the radiative part; solve for A.
  return p.B * (h_from_alpha_bar(0.0, e, alpha_bar_J(e, p), p) / p.rho);
}

double dh_deta_J(double eta, const JormungandParams& p) {
  const double e = std::clamp(eta, 0.0, 1.0);
  const double s = budyko::insolation(e, p.s2);
  const double sp = 3.0 * p.s2 * e;  // d/dy of insolation
  const double a2 = alpha2_J(e, p);
  const double th = std::tanh(p.M * (e - p.y_snow));
  const double a2p = 0.5 * (p.alpha_s - p.alpha_i) * p.M * (1.0 - th * th);
  const double a_line = 0.5 * (p.alpha_w + a2);
  const double a_line_p = 0.5 * a2p;
  const double abar_p = s * (p.alpha_w - a2);  // tail differentiates to -s*a2
  return p.rho * p.Q / (p.B + p.C) *
         (sp * (1.0 - a_line) - s * a_line_p - (p.C / p.B) * abar_p);
}

filippov::SmoothField as_ice_line_model_J(const JormungandParams& p) {
  p.validate();
  auto table = build_tail_table(p);
  filippov::SmoothField f;
  f.G = [delta = p.delta, eta_c = p.eta_c](double, double eta) {
    return delta * (eta - eta_c);
  };
  f.H = [p, table](double A, double eta) {
    const double e = std::clamp(eta, 0.0, 1.0);
    return h_from_alpha_bar(A, e, alpha_bar_from_tail(e, (*table)(e), p), p);
  };
  double steepest = 0.0;
  for (int i = 0; i <= 256; ++i)
    steepest = std::max(steepest, std::abs(dh_deta_J(i / 256.0, p)));
  f.lipschitz_hint = std::hypot(p.rho / p.B, steepest) + p.delta;
  return f;
}

IceLineModel make_model(const JormungandParams& p) {
  IceLineModel m;
  m.name = "jormungand";
  m.field = as_ice_line_model_J(p);
  m.rho = p.rho;
  m.delta = p.delta;
  m.eta_c = p.eta_c;
  m.nullcline_A = [p](double eta) { return nullcline_A_J(eta, p); };
  m.dh_dA = [p](double, double) { return -p.rho / p.B; };
  m.dh_deta = [p](double, double eta) { return dh_deta_J(eta, p); };
  return m;
}

}  // namespace iceline::jormungand
