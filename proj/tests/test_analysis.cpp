#include <doctest.h>

#include <cmath>
#include <iceline/analysis.hpp>
#include <iceline/budyko.hpp>
#include <iceline/jormungand.hpp>
#include <random>

using namespace iceline;
using namespace iceline::analysis;
using filippov::Mode;

namespace {

IceLineModel budyko_model(double eta_c, double delta = 0.2) {
  budyko::BudykoParams p;
  p.eta_c = eta_c;
  p.delta = delta;
  return budyko::make_model(p);
}

}  // namespace

TEST_CASE("equilibrium_report matches the analytic model report") {
  budyko::BudykoParams p;
  p.eta_c = 0.85;
  p.delta = 0.01;
  const EquilibriumReport a = equilibrium_report(budyko::make_model(p));
  const EquilibriumReport b = budyko::equilibrium(p);
  CHECK(a.A_c == b.A_c);
  CHECK(a.stability == b.stability);
  CHECK((a.jacobian.array() == b.jacobian.array()).all());
  CHECK(a.eigenvalues[0] == b.eigenvalues[0]);
  CHECK(a.eigenvalues[1] == b.eigenvalues[1]);
}

TEST_CASE("lower-boundary slide durations against the closed form") {
  const IceLineModel m = budyko_model(0.6, 0.01);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{180.0, 0.0, 0.0, Mode::Interior};
  const ExitReport r = snowball_exit_experiment(m, ic, cfg, 2e4);

  CHECK(r.boundary == filippov::BoundarySide::Lower);
  CHECK(r.entry_t == 0.0);
  CHECK(r.entry_A == 180.0);
  CHECK(std::abs(r.analytic_exit_time - 1780.0) < 1e-6);

  const double measured = r.exit_t - r.entry_t;
  CHECK(std::abs(measured - r.analytic_exit_time) < 1e-3);
  CHECK(std::abs(measured / r.analytic_exit_time - 1.0) <= 0.01);
  CHECK(std::abs(r.exit_A - budyko::nullcline_A(0.0)) <= 1e-9);
}

TEST_CASE("upper-boundary slide durations against the closed form") {
  const IceLineModel m = budyko_model(0.6, 0.01);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{195.0, 1.0, 0.0, Mode::Interior};
  const ExitReport r = snowball_exit_experiment(m, ic, cfg, 2e4);

  CHECK(r.boundary == filippov::BoundarySide::Upper);
  const double expected =
      (budyko::nullcline_A(1.0) - 195.0) / (0.01 * (1.0 - 0.6));
  CHECK(std::abs(r.analytic_exit_time - expected) < 1e-9);
  CHECK(std::abs((r.exit_t - r.entry_t) / expected - 1.0) <= 0.01);
  CHECK(std::abs(r.exit_A - budyko::nullcline_A(1.0)) <= 1e-9);
}

TEST_CASE("a start exactly at the release point slides for zero time") {
  const IceLineModel m = budyko_model(0.6, 0.01);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{budyko::nullcline_A(0.0), 0.0, 0.0,
                                 Mode::Interior};
  const ExitReport r = snowball_exit_experiment(m, ic, cfg, 100.0);
  CHECK(r.entry_t == r.exit_t);
  CHECK(r.entry_A == r.exit_A);
  CHECK(r.analytic_exit_time == 0.0);
}

TEST_CASE("slide-experiment failure modes") {
  filippov::IntegratorConfig cfg;
  // Near the stable rest point the orbit never reaches a boundary.
  {
    const IceLineModel m = budyko_model(0.85);
    const EquilibriumReport eq = equilibrium_report(m);
    const filippov::PlanarState ic{eq.A_c + 0.5, 0.85, 0.0, Mode::Interior};
    CHECK_THROWS_AS(snowball_exit_experiment(m, ic, cfg, 100.0), NoEntryError);
  }
  // eta_c <= 0 gives a one-sided slide with no analytic release.
  {
    budyko::BudykoParams p;
    p.eta_c = 0.0;
    const IceLineModel m = budyko::make_model(p);
    const filippov::PlanarState ic{180.0, 0.0, 0.0, Mode::Interior};
    CHECK_THROWS_AS(snowball_exit_experiment(m, ic, cfg, 100.0),
                    PreconditionError);
  }
}

TEST_CASE("relaxation orbit detection on the section") {
  const IceLineModel m = budyko_model(0.6);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{m.nullcline_A(0.6) + 1.0, 0.6, 0.0,
                                 Mode::Interior};
  const PeriodicOrbitReport r = detect_periodic_orbit(m, ic, cfg, 1e4);

  CHECK(r.converged);
  CHECK(r.crossings >= 4);
  CHECK(r.period > 100.0);
  CHECK(r.period < 2000.0);
  CHECK(r.eta_min < 0.05);
  CHECK(r.eta_max > 0.95);
  CHECK(r.includes_sliding.first);
  CHECK(r.includes_sliding.second);
  CHECK(r.A_min < r.section_A);
  CHECK(r.section_A < r.A_max);
  CHECK(r.return_tol > 0.0);

  // Re-integrating from the recorded section point lands back on it.
  const filippov::PlanarState ic2{r.section_A, 0.6, 0.0, Mode::Interior};
  const PeriodicOrbitReport r2 =
      detect_periodic_orbit(m, ic2, cfg, 4.0 * r.period);
  CHECK(std::abs(r2.section_A - r.section_A) <= 10.0 * r.return_tol);
  CHECK(std::abs(r2.period - r.period) < 1.0);
}

TEST_CASE("an explicit return tolerance is honored verbatim") {
  const IceLineModel m = budyko_model(0.6);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{m.nullcline_A(0.6) + 1.0, 0.6, 0.0,
                                 Mode::Interior};
  const PeriodicOrbitReport r = detect_periodic_orbit(m, ic, cfg, 1e4, 1e-2);
  CHECK(r.return_tol == 1e-2);
  CHECK(r.converged);
}

TEST_CASE("no recurrence near the stable rest point") {
  const IceLineModel m = budyko_model(0.85);
  filippov::IntegratorConfig cfg;
  const EquilibriumReport eq = equilibrium_report(m);
  const filippov::PlanarState ic{eq.A_c + 1.0, 0.85, 0.0, Mode::Interior};
  bool rejected = false;
  try {
    const PeriodicOrbitReport r = detect_periodic_orbit(m, ic, cfg, 600.0);
    rejected = !r.converged;
  } catch (const NonRecurrentError&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("jormungand orbits exist at both reference balance points") {
  for (const double ec : {0.8, 0.15}) {
    jormungand::JormungandParams p;
    p.eta_c = ec;
    const IceLineModel m = jormungand::make_model(p);
    filippov::IntegratorConfig cfg;
    const filippov::PlanarState ic{m.nullcline_A(ec) + 1.0, ec, 0.0,
                                   Mode::Interior};
    const PeriodicOrbitReport r = detect_periodic_orbit(m, ic, cfg, 1e4);
    CHECK(r.converged);
    CHECK(r.period > 10.0);
    CHECK(r.eta_min < ec);
    CHECK(r.eta_max > ec);
  }
}

TEST_CASE("sliding segments of a relaxation orbit alternate and funnel") {
  const IceLineModel m = budyko_model(0.6);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{m.nullcline_A(0.6) + 1.0, 0.6, 0.0,
                                 Mode::Interior};
  const filippov::Trajectory traj =
      filippov::integrate(m.field, ic, 3000.0, cfg);
  const auto segs = sliding_segments(traj);
  REQUIRE(segs.size() >= 3);

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const SlidingSegment& s = segs[i];
    CHECK(s.t_end > s.t_start);
    if (i > 0) {
      CHECK(s.t_start >= segs[i - 1].t_end);
      CHECK(s.boundary != segs[i - 1].boundary);  // strict alternation
    }
    if (s.boundary == filippov::BoundarySide::Lower) {
      CHECK(s.A_end < s.A_start);
      if (!s.open_end)
        CHECK(std::abs(s.A_end - budyko::nullcline_A(0.0)) < 1e-6);
    } else {
      CHECK(s.A_end > s.A_start);
      if (!s.open_end)
        CHECK(std::abs(s.A_end - budyko::nullcline_A(1.0)) < 1e-6);
    }
  }
}

TEST_CASE("sliding segments are empty for an interior trajectory") {
  const IceLineModel m = budyko_model(0.85);
  filippov::IntegratorConfig cfg;
  const EquilibriumReport eq = equilibrium_report(m);
  const filippov::PlanarState ic{eq.A_c + 0.5, 0.85, 0.0, Mode::Interior};
  const filippov::Trajectory traj =
      filippov::integrate(m.field, ic, 100.0, cfg);
  CHECK(sliding_segments(traj).empty());
}

TEST_CASE("a trajectory that ends mid-slide reports an open segment") {
  const IceLineModel m = budyko_model(0.6);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{180.0, 0.0, 0.0, Mode::Interior};
  const filippov::Trajectory traj =
      filippov::integrate(m.field, ic, 50.0, cfg);
  const auto segs = sliding_segments(traj);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].open_end);
  CHECK(segs[0].t_start == 0.0);
  CHECK(segs[0].t_end == 50.0);
  CHECK(segs[0].A_start == 180.0);
}

TEST_CASE("a trajectory that starts mid-slide still pairs its exit") {
  const IceLineModel m = budyko_model(0.6);
  filippov::IntegratorConfig cfg;
  const filippov::PlanarState ic{180.0, 0.0, 7.0, Mode::SlideLower};

  // Short horizon: the whole trajectory is one unfinished slide.
  const auto whole = sliding_segments(
      filippov::integrate(m.field, ic, 7.0 + 50.0, cfg));
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].open_end);
  CHECK(whole[0].t_start == 7.0);
  CHECK(whole[0].A_start == 180.0);

  // Long horizon: the exit event closes a segment that began at the start.
  const auto closed = sliding_segments(
      filippov::integrate(m.field, ic, 7.0 + 200.0, cfg));
  REQUIRE(!closed.empty());
  CHECK(closed[0].t_start == 7.0);
  CHECK(!closed[0].open_end);
  CHECK(std::abs(closed[0].A_end - budyko::nullcline_A(0.0)) < 1e-6);
}

TEST_CASE("sweep classifies stable and oscillatory balance points") {
  filippov::IntegratorConfig cfg;
  const ModelFamily family = [](double ec) { return budyko_model(ec); };

  SweepOptions opts;
  opts.t_max = 8000.0;

  const auto stable_rows = sweep_eta_c(family, {0.85, 0.9}, cfg, opts);
  REQUIRE(stable_rows.size() == 2);
  for (const BifurcationRow& row : stable_rows) {
    CHECK(row.attractor == Attractor::Equilibrium);
    CHECK(row.equilibrium.stability == Stability::Stable);
    CHECK(!row.orbit.has_value());
  }

  const auto orbit_rows = sweep_eta_c(family, {0.5, 0.6}, cfg, opts);
  REQUIRE(orbit_rows.size() == 2);
  for (const BifurcationRow& row : orbit_rows) {
    CHECK(row.attractor == Attractor::PeriodicOrbit);
    REQUIRE(row.orbit.has_value());
    CHECK(row.orbit->converged);
  }

  // The classification flips across the fold of the nullcline.
  const auto straddle = sweep_eta_c(family, {0.75, 0.80}, cfg, opts);
  CHECK(straddle[0].attractor == Attractor::PeriodicOrbit);
  CHECK(straddle[1].attractor == Attractor::Equilibrium);
}

TEST_CASE("sweep validates the grid") {
  filippov::IntegratorConfig cfg;
  const ModelFamily family = [](double ec) { return budyko_model(ec); };
  CHECK_THROWS_AS(sweep_eta_c(family, {0.5, 1.0}, cfg), PreconditionError);
  CHECK_THROWS_AS(sweep_eta_c(family, {0.0}, cfg), PreconditionError);
}

TEST_CASE("per-row failures become undetermined rows with a reason") {
  filippov::IntegratorConfig cfg;
  const ModelFamily family = [](double) -> IceLineModel {
    throw std::runtime_error("synthetic model failure");
  };
  const auto rows = sweep_eta_c(family, {0.3, 0.6}, cfg);
  REQUIRE(rows.size() == 2);
  for (const BifurcationRow& row : rows) {
    CHECK(row.attractor == Attractor::Undetermined);
    CHECK(row.reason.find("synthetic model failure") != std::string::npos);
  }
}

TEST_CASE("parallel sweeps reproduce the serial rows bit for bit") {
  filippov::IntegratorConfig cfg;
  const ModelFamily family = [](double ec) { return budyko_model(ec); };
  SweepOptions serial, parallel;
  serial.t_max = parallel.t_max = 6000.0;
  serial.jobs = 1;
  parallel.jobs = 4;

  const std::vector<double> grid{0.4, 0.55, 0.7, 0.85};
  const auto a = sweep_eta_c(family, grid, cfg, serial);
  const auto b = sweep_eta_c(family, grid, cfg, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].eta_c == b[i].eta_c);
    CHECK(a[i].attractor == b[i].attractor);
    CHECK(a[i].equilibrium.A_c == b[i].equilibrium.A_c);
    CHECK(a[i].orbit.has_value() == b[i].orbit.has_value());
    if (a[i].orbit && b[i].orbit) {
      CHECK(a[i].orbit->period == b[i].orbit->period);
      CHECK(a[i].orbit->section_A == b[i].orbit->section_A);
    }
  }
}

TEST_CASE("random entry points funnel to the same release value") {
  const IceLineModel m = budyko_model(0.6, 0.01);
  filippov::IntegratorConfig cfg;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  const double A_star = budyko::nullcline_A(0.0);
  for (int i = 0; i < 5; ++i) {
    const double A0 = A_star + u(rng);
    const filippov::PlanarState ic{A0, 0.0, 0.0, Mode::Interior};
    const ExitReport r = snowball_exit_experiment(m, ic, cfg, 2e4);
    CHECK(std::abs((r.exit_t - r.entry_t) / r.analytic_exit_time - 1.0) <=
          0.01);
    CHECK(std::abs(r.exit_A - A_star) <= 1e-9);
  }
}
