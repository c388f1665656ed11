#include "iceline/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "iceline/errors.hpp"

namespace iceline::analysis {

namespace {

using filippov::Event;
using filippov::EventKind;
using filippov::Mode;

BoundarySide side_of_state(const PlanarState& s) {
  if (s.mode == Mode::SlideLower) return BoundarySide::Lower;
  if (s.mode == Mode::SlideUpper) return BoundarySide::Upper;
  return s.y < 0.5 ? BoundarySide::Lower : BoundarySide::Upper;
}

}  // namespace

EquilibriumReport equilibrium_report(const IceLineModel& model) {
  const double A_c = model.nullcline_A(model.eta_c);
  Eigen::Matrix2d J;
  J << 0.0, model.delta,  //
      model.dh_dA(A_c, model.eta_c), model.dh_deta(A_c, model.eta_c);
  return equilibrium_from_jacobian(A_c, model.eta_c, J);
}

ExitReport snowball_exit_experiment(const IceLineModel& model,
                                    const PlanarState& ic,
                                    const IntegratorConfig& cfg,
                                    double t_max) {
  if (!(model.eta_c > 0.0))
    throw PreconditionError("snowball_exit_experiment: requires eta_c > 0");
  cfg.validate();

  // A start exactly at a boundary tangency slides for zero time.
  for (const BoundarySide side :
       {BoundarySide::Lower, BoundarySide::Upper}) {
    if (std::abs(ic.y - filippov::boundary_value(side)) <= cfg.boundary_tol &&
        filippov::boundary_mode(model.field, ic.x, side, cfg) ==
            filippov::BoundaryMode::Tangency) {
      ExitReport r;
      r.entry_t = r.exit_t = ic.t;
      r.entry_A = r.exit_A = ic.x;
      r.boundary = side;
      return r;
    }
  }

  filippov::IntegrateOptions opts;
  opts.dt_out = std::max(1.0, (t_max - ic.t) / 200000.0);
  const Trajectory traj = filippov::integrate(model.field, ic, t_max, cfg, opts);

  const Event* entry = nullptr;
  const Event* exit = nullptr;
  for (const Event& e : traj.events) {
    if (!entry && e.kind == EventKind::SlidingEntry) {
      entry = &e;
    } else if (entry && e.kind == EventKind::SlidingExit &&
               side_of_state(e.state) == side_of_state(entry->state)) {
      exit = &e;
      break;
    }
  }
  if (!entry)
    throw NoEntryError(
        "snowball_exit_experiment: orbit never reached a boundary before t_max");
  if (!exit)
    throw NoEntryError(
        "snowball_exit_experiment: slide did not release before t_max");

  ExitReport r;
  r.boundary = side_of_state(entry->state);
  r.entry_t = entry->t;
  r.entry_A = entry->state.x;
  r.exit_t = exit->t;
  r.exit_A = exit->state.x;
  if (r.boundary == BoundarySide::Lower) {
    // dA/dt = -delta*eta_c while sliding on eta = 0
    r.analytic_exit_time =
        (r.entry_A - model.nullcline_A(0.0)) / (model.delta * model.eta_c);
  } else {
    // dA/dt = +delta*(1 - eta_c) while sliding on eta = 1
    r.analytic_exit_time = (model.nullcline_A(1.0) - r.entry_A) /
                           (model.delta * (1.0 - model.eta_c));
  }
  return r;
}

PeriodicOrbitReport detect_periodic_orbit(const IceLineModel& model,
                                          const PlanarState& ic,
                                          const IntegratorConfig& cfg,
                                          double t_max, double return_tol) {
  cfg.validate();
  filippov::IntegrateOptions opts;
  opts.dt_out = std::max(1.0, (t_max - ic.t) / 200000.0);
  opts.section_y = model.eta_c;
  const Trajectory traj = filippov::integrate(model.field, ic, t_max, cfg, opts);

  std::vector<const Event*> cross;
  for (const Event& e : traj.events)
    if (e.kind == EventKind::SectionCross) cross.push_back(&e);
  if (cross.size() < 2)
    throw NonRecurrentError(
        "detect_periodic_orbit: orbit did not return to the section before "
        "t_max");

  double A_lo = std::numeric_limits<double>::infinity();
  double A_hi = -A_lo;
  for (const PlanarState& s : traj.samples) {
    A_lo = std::min(A_lo, s.x);
    A_hi = std::max(A_hi, s.x);
  }

  PeriodicOrbitReport r;
  r.return_tol =
      return_tol > 0.0 ? return_tol : 1e-6 * std::max(A_hi - A_lo, 1e-6);
  r.crossings = static_cast<int>(cross.size());
  if (cross.size() >= 4) {
    r.converged = true;
    for (std::size_t k = cross.size() - 3; k < cross.size(); ++k)
      r.converged = r.converged && std::abs(cross[k]->state.x -
                                            cross[k - 1]->state.x) <
                                       r.return_tol;
  }
  r.period = cross.back()->t - cross[cross.size() - 2]->t;
  r.section_A = cross.back()->state.x;
  r.section_t = cross.back()->t;

  // Observables over the final full cycle.
  const double w0 = r.section_t - r.period, w1 = r.section_t;
  r.eta_min = r.A_min = std::numeric_limits<double>::infinity();
  r.eta_max = r.A_max = -r.eta_min;
  for (const PlanarState& s : traj.samples) {
    if (s.t < w0 || s.t > w1) continue;
    r.eta_min = std::min(r.eta_min, s.y);
    r.eta_max = std::max(r.eta_max, s.y);
    r.A_min = std::min(r.A_min, s.x);
    r.A_max = std::max(r.A_max, s.x);
    if (s.mode == Mode::SlideLower) r.includes_sliding.first = true;
    if (s.mode == Mode::SlideUpper) r.includes_sliding.second = true;
  }
  return r;
}

std::vector<SlidingSegment> sliding_segments(const Trajectory& traj) {
  std::vector<SlidingSegment> out;
  std::optional<SlidingSegment> open;
  for (const Event& e : traj.events) {
    if (e.kind == EventKind::SlidingEntry) {
      if (open) {  // defensive: close a dangling segment at the new entry
        open->t_end = e.t;
        open->A_end = e.state.x;
        open->open_end = true;
        out.push_back(*open);
      }
      open = SlidingSegment{side_of_state(e.state), e.t,  e.t,
                            e.state.x,              e.state.x, false};
    } else if (e.kind == EventKind::SlidingExit) {
      if (!open) {  // trajectory began mid-slide
        const PlanarState& s0 = traj.samples.front();
        open = SlidingSegment{side_of_state(e.state), s0.t, s0.t, s0.x, s0.x,
                              false};
      }
      open->t_end = e.t;
      open->A_end = e.state.x;
      out.push_back(*open);
      open.reset();
    }
  }
  if (open) {
    open->t_end = traj.samples.back().t;
    open->A_end = traj.samples.back().x;
    open->open_end = true;
    out.push_back(*open);
  } else if (out.empty() && !traj.samples.empty() &&
             traj.samples.front().mode != Mode::Interior &&
             traj.samples.back().mode == traj.samples.front().mode) {
    // Whole trajectory inside one slide: no events were ever emitted.
    const PlanarState& s0 = traj.samples.front();
    const PlanarState& s1 = traj.samples.back();
    out.push_back({side_of_state(s0), s0.t, s1.t, s0.x, s1.x, true});
  }
  return out;
}

namespace {

BifurcationRow sweep_row(const ModelFamily& family, double eta_c,
                         const IntegratorConfig& cfg,
                         const SweepOptions& opts) {
  BifurcationRow row;
  row.eta_c = eta_c;
  try {
    const IceLineModel model = family(eta_c);
    row.equilibrium = equilibrium_report(model);
    if (row.equilibrium.stability == Stability::Stable) {
      row.attractor = Attractor::Equilibrium;
      return row;
    }
    const PlanarState ic{model.nullcline_A(eta_c) + 1.0, eta_c, 0.0,
                         Mode::Interior};
    row.orbit = detect_periodic_orbit(model, ic, cfg, opts.t_max,
                                      opts.return_tol);
    if (row.orbit->converged) {
      row.attractor = Attractor::PeriodicOrbit;
    } else {
      row.attractor = Attractor::Undetermined;
      row.reason = "return map did not converge before t_max";
    }
  } catch (const std::exception& e) {
    row.attractor = Attractor::Undetermined;
    row.orbit.reset();
    row.reason = e.what();
  }
  return row;
}

}  // namespace

std::vector<BifurcationRow> sweep_eta_c(const ModelFamily& family,
                                        const std::vector<double>& grid,
                                        const IntegratorConfig& cfg,
                                        const SweepOptions& opts) {
  cfg.validate();
  for (const double v : grid)
    if (!(v > 0.0 && v < 1.0))
      throw PreconditionError("sweep_eta_c: grid values must lie in (0,1)");

  std::vector<BifurcationRow> rows(grid.size());
  const int jobs = std::clamp<int>(opts.jobs, 1,
                                   std::max(1u, std::thread::hardware_concurrency() * 4));
  if (jobs == 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      rows[i] = sweep_row(family, grid[i], cfg, opts);
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < grid.size(); i += jobs)
        rows[i] = sweep_row(family, grid[i], cfg, opts);
    });
  }
  for (std::thread& th : pool) th.join();
  return rows;
}

}  // namespace iceline::analysis
