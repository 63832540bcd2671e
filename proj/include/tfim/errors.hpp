#pragma once

#include <stdexcept>
#include <string>

namespace tfim {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (bad dimensions, zero weights, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Requested problem size exceeds a configured cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, int limit) : Error(what), limit_(limit) {}
  int limit() const { return limit_; }

 private:
  int limit_;
};

/// A formula or quantity is undefined for the given parameters.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver gave up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Invalid user configuration (CLI flags, config files, output paths).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tfim
