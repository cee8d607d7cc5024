#pragma once

#include <stdexcept>
#include <string>

namespace miranda {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric input outside the mathematical domain of an operation
/// (negative length, evaluation at a kernel singularity, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Structurally invalid arguments (too few points, mismatched grids,
/// empty admissible sets, geometry violations).
struct ArgumentError : Error {
  using Error::Error;
};

/// The input lacks a capability the operation needs (missing
/// differentiable representation, unsupported kernel splitting).
struct CapabilityError : Error {
  using Error::Error;
};

/// A domain object failed its construction-time validation.
struct ConstructionError : Error {
  using Error::Error;
};

/// The requested accuracy is unattainable; carries the achieved estimate.
struct PrecisionError : Error {
  double achieved_error;
  PrecisionError(const std::string& msg, double achieved)
      : Error(msg), achieved_error(achieved) {}
};

/// Boundary-trace extrapolation did not converge.
struct TraceError : Error {
  using Error::Error;
};

/// Experiment configuration failed schema validation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace miranda
