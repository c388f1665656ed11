#include "iceline/model.hpp"

#include <cmath>
#include <complex>

namespace iceline {

EquilibriumReport equilibrium_from_jacobian(double A_c, double eta_c,
                                            const Eigen::Matrix2d& jacobian,
                                            double re_tol) {
  EquilibriumReport r;
  r.A_c = A_c;
  r.eta_c = eta_c;
  r.jacobian = jacobian;

  const double tr = jacobian.trace();
  const double det = jacobian.determinant();
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    r.eigenvalues << std::complex<double>(0.5 * tr + s, 0.0),
        std::complex<double>(0.5 * tr - s, 0.0);
  } else {
    const double s = std::sqrt(-disc);
    r.eigenvalues << std::complex<double>(0.5 * tr, s),
        std::complex<double>(0.5 * tr, -s);
  }

  const double re_max =
      std::max(r.eigenvalues[0].real(), r.eigenvalues[1].real());
  if (!(eta_c > 0.0 && eta_c < 1.0) || std::abs(re_max) < re_tol)
    r.stability = Stability::Degenerate;
  else
    r.stability = re_max < 0.0 ? Stability::Stable : Stability::Unstable;
  return r;
}

}  // namespace iceline
