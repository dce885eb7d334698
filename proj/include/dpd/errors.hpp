// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <stdexcept>
#include <string>

namespace dpd {

/// Base class for all solver errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside its domain (e.g. log of a nonpositive argument).
struct DomainError : Error {
  using Error::Error;
};

/// An iterative projection failed to reach tolerance; the set is ill-posed.
struct NonConvergence : Error {
  using Error::Error;
};

/// A state handed to the integrator violates set membership beyond tolerance.
struct InfeasibleState : Error {
  using Error::Error;
};

/// Multiplier norm blew past the runaway guard; K is mis-set or the problem infeasible.
struct Diverged : Error {
  using Error::Error;
};

/// The supplied point is not strictly feasible for the coupled constraints.
struct SlaterViolation : Error {
  using Error::Error;
};

/// Reference solution has near-zero magnitude; relative error is undefined.
struct DegenerateReference : Error {
  using Error::Error;
};

/// A reference solve finished without meeting its accuracy gate.
struct LowAccuracy : Error {
  using Error::Error;
};

/// Malformed instance file or run directory.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace dpd
