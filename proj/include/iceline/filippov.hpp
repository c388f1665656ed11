#pragma once

/*
  Event-driven integration of a planar vector field whose second component is
  discontinuous across the horizontal lines y = 0 and y = 1.

  Inside the strip the dynamics are (dx/dt, dy/dt) = (G, H).  Outside, the
  field is extended so that the strip attracts: dy/dt = -|H| above y = 1 and
  dy/dt = +|H| below y = 0, with the one-sided average on the lines
  themselves.  Where the inner field pushes into a boundary, the forward
  solution slides along it with velocity (G, 0) -- the Filippov convex
  combination that annihilates the normal component -- until the tangency
  H = 0 releases it into the interior.

  extended_field() evaluates the five-case extension literally.  The stepper
  realizes the same dynamics by integrating the smooth piece of the current
  region and cutting accepted steps at boundary roots of the dense output.
*/

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "iceline/errors.hpp"

namespace iceline::filippov {

// Right-hand side of the planar system inside the strip.
struct SmoothField {
  std::function<double(double, double)> G;  // dx/dt
  std::function<double(double, double)> H;  // dy/dt for 0 < y < 1
  std::optional<double> lipschitz_hint;     // bound on |grad H| over the strip

  Eigen::Vector2d rate(double x, double y) const { return {G(x, y), H(x, y)}; }
};

enum class Mode : std::uint8_t { Interior, SlideLower, SlideUpper };

enum class BoundarySide : std::uint8_t { Lower, Upper };

inline double boundary_value(BoundarySide side) {
  return side == BoundarySide::Lower ? 0.0 : 1.0;
}

struct PlanarState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  Mode mode = Mode::Interior;
};

enum class RegionLabel : std::uint8_t {
  Above,          // y > 1 (beyond boundary_tol)
  UpperBoundary,  // |y - 1| <= boundary_tol
  Interior,
  LowerBoundary,  // |y| <= boundary_tol
  Below           // y < 0
};

enum class BoundaryMode : std::uint8_t { AttractingSliding, Crossing, Tangency };

enum class EventKind : std::uint8_t {
  BoundaryHit,
  SlidingEntry,
  SlidingExit,
  TangencyCross,
  SectionCross
};

struct Event {
  EventKind kind;
  double t = 0.0;
  PlanarState state;  // state after the transition the event records
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double boundary_tol = 1e-10;  // |y - y_b| window treated as "on boundary"
  double tangency_tol = 1e-9;   // |H| window treated as tangent (H units)
  double max_step = 10.0;
  double max_slide_time = 1e6;  // runaway-slide guard, model time

  void validate() const;  // throws PreconditionError
};

struct Trajectory {
  std::vector<PlanarState> samples;  // dt_out grid + event times, t nondecreasing
  std::vector<Event> events;
  double dt_out = 1.0;
};

struct IntegrateOptions {
  double dt_out = 1.0;
  // Record SectionCross events where y increases through this value.
  std::optional<double> section_y;
};

// Step-level failures surface through integrate() with the prefix of the
// trajectory computed so far, so callers can persist partial output.
struct IntegrationAbort : Error {
  enum class Kind : std::uint8_t { Stiffness, RunawaySlide, DegenerateBoundary };
  IntegrationAbort(Kind k, double t, Trajectory partial_, const std::string& msg)
      : Error(msg), kind(k), t_fail(t), partial(std::move(partial_)) {}
  Kind kind;
  double t_fail;
  Trajectory partial;
};

RegionLabel classify_region(const PlanarState& state,
                            const IntegratorConfig& cfg);

// Literal five-case extension of (G, H) to all of R^2.
Eigen::Vector2d extended_field(const SmoothField& field,
                               const PlanarState& state,
                               const IntegratorConfig& cfg);

// Classification of a boundary point by the sign of the inner normal rate.
BoundaryMode boundary_mode(const SmoothField& field, double x,
                           BoundarySide side, const IntegratorConfig& cfg);

// Sliding velocity (G(x, y_b), 0).  Throws ModeViolationError unless the
// point is AttractingSliding.
Eigen::Vector2d sliding_field(const SmoothField& field, double x,
                              BoundarySide side, const IntegratorConfig& cfg);

// Filippov combination weight at an attracting boundary point: the alpha with
// alpha * f_outer + (1 - alpha) * f_inner normal-free.  Identically 1/2 here.
double sliding_weight(const SmoothField& field, double x, BoundarySide side,
                      const IntegratorConfig& cfg);

// One accepted adaptive step (or boundary-cut fraction of one).  Returns the
// new state plus any events crossed, in time order.
std::pair<PlanarState, std::vector<Event>> step(const SmoothField& field,
                                                const PlanarState& state,
                                                const IntegratorConfig& cfg);

// Integrate from ic to t_max, sampling every opts.dt_out and at event times.
Trajectory integrate(const SmoothField& field, const PlanarState& ic,
                     double t_max, const IntegratorConfig& cfg,
                     const IntegrateOptions& opts = {});

// Monte Carlo estimate of the one-sided Lipschitz quotient
//   (F(z1) - F(z2)) . (z1 - z2) / |z1 - z2|^2
// of the extended field over a box; forward uniqueness needs it bounded above.
double one_sided_lipschitz_estimate(const SmoothField& field,
                                    const Eigen::AlignedBox2d& box,
                                    int n_samples, std::uint64_t seed,
                                    const IntegratorConfig& cfg = {});

}  // namespace iceline::filippov
