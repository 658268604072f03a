#pragma once

#include <stdexcept>
#include <string>

namespace spinrwa {

/// Caller violated an operation's precondition (bad spin, dimension
/// mismatch, wrong block kind, ...).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its tolerance.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Special-function argument outside the supported range.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Solver configuration rejected (e.g. step size too large).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Self-consistency root search found no bracket.
class RootNotFoundError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinrwa
