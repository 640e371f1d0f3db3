#pragma once

#include <stdexcept>
#include <string>

namespace okdrop {

// Input violates an operation's domain (parameter regime, invalid config).
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Kernel evaluated at (or numerically indistinguishable from) its singularity.
class SingularEvaluation : public DomainError {
  public:
    using DomainError::DomainError;
};

// Quadrature / iteration failed to reach the requested accuracy.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace okdrop
