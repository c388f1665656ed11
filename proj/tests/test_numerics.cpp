#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <iceline/errors.hpp>
#include <iceline/numerics.hpp>

#include "oracles.hpp"

using namespace iceline;
using namespace iceline::numerics;

TEST_CASE("brent finds simple roots") {
  auto f = [](double x) { return std::cos(x); };
  const double r = brent_root(f, 1.0, 2.0);
  CHECK(std::abs(r - M_PI / 2.0) < 1e-12);

  auto cubic = [](double x) { return (x - 0.3) * (x * x + 1.0); };
  CHECK(std::abs(brent_root(cubic, 0.0, 1.0) - 0.3) < 1e-12);
}

TEST_CASE("brent honors a root sitting on an endpoint") {
  auto f = [](double x) { return x * (x + 2.0); };
  CHECK(brent_root(f, 0.0, 1.0) == 0.0);
  CHECK(brent_root(f, -1.0, 0.0) == 0.0);
}

TEST_CASE("brent rejects a non-bracketing interval") {
  auto f = [](double x) { return x * x + 1.0; };
  CHECK_THROWS_AS(brent_root(f, -1.0, 1.0), InvalidDomainError);
}

TEST_CASE("brent f_tol short-circuits near-zero residuals") {
  auto f = [](double x) { return (x - 0.5) * 1e-18; };
  RootOptions opts;
  opts.f_tol = 1e-12;
  const double r = brent_root(f, 0.0, 1.0, opts);
  CHECK(std::abs(f(r)) <= opts.f_tol);
}

TEST_CASE("gauss_kronrod_15 integrates smooth functions accurately") {
  auto poly = [](double x) { return x * x; };
  const QuadratureResult q1 = gauss_kronrod_15(poly, 0.0, 1.0);
  CHECK(std::abs(q1.value - 1.0 / 3.0) < 1e-14);
  CHECK(q1.error_estimate < 1e-12);

  auto osc = [](double x) { return std::sin(3.0 * x); };
  const double exact = (1.0 - std::cos(3.0)) / 3.0;
  const QuadratureResult q2 = gauss_kronrod_15(osc, 0.0, 1.0);
  CHECK(std::abs(q2.value - exact) < 1e-12);
}

TEST_CASE("integrate_adaptive matches the Simpson oracle") {
  auto f = [](double x) { return std::exp(-x) * std::cos(5.0 * x); };
  const double ours = integrate_adaptive(f, 0.0, 2.0, 1e-12);
  const double ref = oracles::composite_simpson(f, 0.0, 2.0, 200000);
  CHECK(std::abs(ours - ref) < 1e-10);
}

TEST_CASE("integrate_adaptive handles kinks via split points") {
  // |x - 0.3| has a kink; with the knot supplied both halves are smooth.
  auto f = [](double x) { return std::abs(x - 0.3); };
  const double exact = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
  const double v = integrate_adaptive(f, 0.0, 1.0, 1e-13, {0.3});
  CHECK(std::abs(v - exact) < 1e-13);
}

TEST_CASE("integrate_adaptive ignores knots outside the interval") {
  auto f = [](double x) { return x; };
  const double v = integrate_adaptive(f, 0.0, 1.0, 1e-13, {-1.0, 2.0, 0.5});
  CHECK(std::abs(v - 0.5) < 1e-14);
}

TEST_CASE("integrate_adaptive on an empty interval is zero") {
  auto f = [](double x) { return std::exp(x); };
  CHECK(integrate_adaptive(f, 0.7, 0.7, 1e-12) == 0.0);
}

TEST_CASE("integrate_adaptive reports unreachable tolerance") {
  // A hard integrand with an absurd tolerance and a tiny panel budget.
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
  CHECK_THROWS_AS(integrate_adaptive(f, 0.0, 1.0, 1e-30, {}, 4),
                  AccuracyError);
}

TEST_CASE("reversed interval flips the sign") {
  auto f = [](double x) { return x * x; };
  const double fwd = integrate_adaptive(f, 0.0, 1.0, 1e-12);
  const double bwd = integrate_adaptive(f, 1.0, 0.0, 1e-12);
  CHECK(fwd == -bwd);
}

TEST_CASE("quadratic oracle sanity") {
  auto roots = oracles::quadratic_roots(1.0, -3.0, 2.0);
  REQUIRE(roots.size() == 2);
  const double lo = std::min(roots[0], roots[1]);
  const double hi = std::max(roots[0], roots[1]);
  CHECK(std::abs(lo - 1.0) < 1e-14);
  CHECK(std::abs(hi - 2.0) < 1e-14);
  CHECK(oracles::quadratic_roots(1.0, 0.0, 1.0).empty());
}
