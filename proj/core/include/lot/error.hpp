#pragma once

#include <stdexcept>
#include <string>

namespace lot {

enum class ErrorKind { InvalidInput, InvalidPlan, CutLocus, Convergence, Unsupported };

/// Base class for all library errors. `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

class InvalidPlanError : public Error {
 public:
  explicit InvalidPlanError(const std::string& what) : Error(ErrorKind::InvalidPlan, what) {}
};

/// Raised when a logarithm is requested at or beyond the cut locus.
class CutLocusError : public Error {
 public:
  explicit CutLocusError(const std::string& what) : Error(ErrorKind::CutLocus, what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::Convergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(ErrorKind::Unsupported, what) {}
};

}  // namespace lot
