#pragma once

#include <stdexcept>
#include <string>

namespace vsr {

// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Body mutation could not produce a valid grid within the retry cap.
struct RetryExhausted : Error {
  using Error::Error;
};

// Population-level statistic requested on fewer than two bodies.
struct DegeneratePopulation : Error {
  using Error::Error;
};

// Vector/matrix dimensions do not match what the callee expects.
struct ShapeMismatch : Error {
  using Error::Error;
};

// A simulated coordinate became non-finite; the SimConfig is unstable.
struct NumericalBlowup : Error {
  using Error::Error;
};

// Terrain geometry prevents placing a body at the requested spawn.
struct SpawnCollision : Error {
  using Error::Error;
};

// Kernel matrix factorization failed even after jitter escalation.
struct SingularKernel : Error {
  using Error::Error;
};

// A social-learning mode needs more distinct teachers or samples than exist.
struct InsufficientTeachers : Error {
  using Error::Error;
};

// A run directory does not contain the artifacts an analysis command needs.
struct MissingRun : Error {
  using Error::Error;
};

// Malformed textual input (body strings, config files, CSV rows).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace vsr
