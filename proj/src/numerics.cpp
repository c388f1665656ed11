#include "iceline/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "iceline/errors.hpp"

namespace iceline::numerics {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  RootOptions opts) {
  return brent_root(f, a, b, f(a), f(b), opts);
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, RootOptions opts) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(fa) ||
      !std::isfinite(fb))
    throw InvalidDomainError("brent_root: non-finite bracket");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw InvalidDomainError("brent_root: endpoints do not bracket a root");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol =
        2.0 * kEps * std::abs(b) + 0.5 * std::max(opts.t_tol, 4.0 * kEps);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0 ||
        (opts.f_tol > 0.0 && std::abs(fb) <= opts.f_tol))
      return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;  // bisection
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {  // secant
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {  // inverse quadratic interpolation
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

namespace {

// QUADPACK 15-point Kronrod abscissae/weights with embedded 7-point Gauss.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace

QuadratureResult gauss_kronrod_15(const std::function<double(double)>& f,
                                  double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = f(mid);
  double kronrod = kWgk[7] * f_mid;
  double gauss = kWg[3] * f_mid;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  QuadratureResult r;
  r.value = kronrod * half;
  r.error_estimate = std::abs((kronrod - gauss) * half);
  r.panels = 1;
  return r;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol,
                          std::initializer_list<double> split_points,
                          int max_panels) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw InvalidDomainError("integrate_adaptive: non-finite interval");
  if (a == b) return 0.0;
  const double sign = (a < b) ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);

  std::vector<double> knots{a, b};
  for (double s : split_points)
    if (s > a && s < b) knots.push_back(s);
  std::sort(knots.begin(), knots.end());

  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  int panels = 0;
  auto push = [&](double lo, double hi) {
    const QuadratureResult q = gauss_kronrod_15(f, lo, hi);
    heap.push({lo, hi, q.value, q.error_estimate});
    total += q.value;
    total_err += q.error_estimate;
    ++panels;
  };
  for (size_t i = 0; i + 1 < knots.size(); ++i) push(knots[i], knots[i + 1]);

  while (total_err > abs_tol && panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at ulp resolution
      total += worst.value;
      total_err += worst.err;
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
  }
  if (total_err > abs_tol) {
    std::ostringstream msg;
    msg << "integrate_adaptive: requested " << abs_tol << " but achieved "
        << total_err << " after " << panels << " panels";
    throw AccuracyError(msg.str());
  }
  return sign * total;
}

}  // namespace iceline::numerics
