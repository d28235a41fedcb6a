#pragma once

#include <stdexcept>
#include <string>

namespace fluxnet {

// Failure classes. The CLI maps each one to a distinct exit code.

/// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterative procedure (eigensolver, Newton, truncation or step doubling)
/// did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A dense or Hilbert-space dimension budget would be exceeded.
class BudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A physical consistency gate failed (invariant residual, infeasible coupler
/// settings, endpoint margin requirement).
class PhysicsGateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace fluxnet
