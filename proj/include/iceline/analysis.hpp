#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iceline/model.hpp"

namespace iceline::analysis {

using filippov::BoundarySide;
using filippov::IntegratorConfig;
using filippov::PlanarState;
using filippov::Trajectory;

// Outcome of driving an orbit onto a boundary and timing the slide until the
// tangency releases it.  analytic_exit_time is the closed-form slide
// duration (entry_A - A_tangency) / |dA/dt on the boundary|.
struct ExitReport {
  double entry_t = 0.0;
  double entry_A = 0.0;
  double exit_t = 0.0;
  double exit_A = 0.0;
  double analytic_exit_time = 0.0;
  BoundarySide boundary = BoundarySide::Lower;
};

struct PeriodicOrbitReport {
  double period = 0.0;
  double eta_min = 0.0, eta_max = 0.0;
  double A_min = 0.0, A_max = 0.0;
  std::pair<bool, bool> includes_sliding{false, false};  // lower, upper
  bool converged = false;
  double section_A = 0.0;  // A at the last recorded section crossing
  double section_t = 0.0;
  double return_tol = 0.0;  // tolerance actually applied
  int crossings = 0;
};

struct SlidingSegment {
  BoundarySide boundary = BoundarySide::Lower;
  double t_start = 0.0, t_end = 0.0;
  double A_start = 0.0, A_end = 0.0;
  bool open_end = false;  // trajectory ended while still sliding
};

enum class Attractor { Equilibrium, PeriodicOrbit, Undetermined };

struct BifurcationRow {
  double eta_c = 0.0;
  Attractor attractor = Attractor::Undetermined;
  EquilibriumReport equilibrium;
  std::optional<PeriodicOrbitReport> orbit;
  std::string reason;  // populated when Undetermined
};

// Rest point and linearization of a model at its own eta_c.
EquilibriumReport equilibrium_report(const IceLineModel& model);

// Integrate until the orbit slides on a boundary and exits at the tangency.
// Throws NoEntryError if no slide starts (or finishes) before t_max,
// PreconditionError if the model has eta_c <= 0.  A start exactly on a
// boundary tangency reports a zero-duration slide.
ExitReport snowball_exit_experiment(const IceLineModel& model,
                                    const PlanarState& ic,
                                    const IntegratorConfig& cfg,
                                    double t_max = 1e5);

// Return map on the section eta = model.eta_c (upward crossings).  Converged
// once the last three consecutive crossing-A differences are below
// return_tol (default 1e-6 of the observed A range).  Throws
// NonRecurrentError when fewer than two crossings occur.
PeriodicOrbitReport detect_periodic_orbit(const IceLineModel& model,
                                          const PlanarState& ic,
                                          const IntegratorConfig& cfg,
                                          double t_max,
                                          double return_tol = 0.0);

// Entry/exit pairing of the sliding episodes recorded in a trajectory.
std::vector<SlidingSegment> sliding_segments(const Trajectory& traj);

// Builds the model for a given eta_c; everything else fixed by the caller.
using ModelFamily = std::function<IceLineModel(double)>;

struct SweepOptions {
  double t_max = 2e4;      // per-row orbit-detection horizon
  double return_tol = 0.0; // 0: automatic
  int jobs = 1;            // worker threads; rows stay in grid order
};

// One row per grid value: Equilibrium when the rest point is stable,
// otherwise the detected orbit; per-row failures become Undetermined rows
// with the reason attached.  Grid values must lie strictly inside (0,1).
std::vector<BifurcationRow> sweep_eta_c(const ModelFamily& family,
                                        const std::vector<double>& grid,
                                        const IntegratorConfig& cfg,
                                        const SweepOptions& opts = {});

}  // namespace iceline::analysis
