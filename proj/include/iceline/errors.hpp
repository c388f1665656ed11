#pragma once

#include <stdexcept>
#include <string>

namespace iceline {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State contains NaN/Inf or is inconsistent with its mode.
struct InvalidStateError : Error { using Error::Error; };

// Sampling box or interval is degenerate.
struct InvalidDomainError : Error { using Error::Error; };

// A sliding-only operation was invoked at a non-sliding point.
struct ModeViolationError : Error { using Error::Error; };

// Step size underflowed; the problem is stiff at the reported time.
struct StiffnessError : Error { using Error::Error; };

// Sliding exceeded max_slide_time without reaching a tangency.
struct RunawaySlideError : Error { using Error::Error; };

// Orbit started at a tangency point with no transverse escape.
struct DegenerateBoundaryError : Error { using Error::Error; };

// Quadrature could not reach the requested accuracy.
struct AccuracyError : Error { using Error::Error; };

// No sign change of the nullcline slope inside the unit interval.
struct NoFoldError : Error { using Error::Error; };

// Orbit never reached the boundary (or never left it) in time.
struct NoEntryError : Error { using Error::Error; };

// Orbit never returned to the section.
struct NonRecurrentError : Error { using Error::Error; };

// Caller-supplied parameters violate a documented precondition.
struct PreconditionError : Error { using Error::Error; };

}  // namespace iceline
