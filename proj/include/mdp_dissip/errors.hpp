#pragma once

#include <stdexcept>
#include <string>

namespace mdp_dissip {

// Base type for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed arguments: dimension mismatches, bad configs, unparsable files.
struct InputError : Error {
  using Error::Error;
};

// Value outside the mathematical domain of an operation (non-symmetric
// where symmetry is required, not positive definite, eigenvalue <= -1, ...).
struct DomainError : Error {
  using Error::Error;
};

// An iteration hit its cap without meeting its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Spectral radius at or above one where a strict contraction is required.
struct InstabilityError : Error {
  using Error::Error;
};

// Riccati iteration diverged or produced an unstable closed loop.
struct StabilizabilityError : Error {
  using Error::Error;
};

// A certified quantity failed its own validity check.
struct CertificationError : Error {
  using Error::Error;
};

// Fixed point exists but is not unique (reducible chain).
struct UniquenessError : Error {
  using Error::Error;
};

// Exhaustive search ended with no admissible candidate.
struct NoSolutionError : Error {
  using Error::Error;
};

// Problem instance too large for an exhaustive routine.
struct SizeError : Error {
  using Error::Error;
};

// A series whose partial sums fail to settle.
struct DivergenceError : Error {
  using Error::Error;
};

// Optimality-equation span fails to contract (gain not constant).
struct MultichainError : Error {
  using Error::Error;
};

}  // namespace mdp_dissip
