#pragma once

#include <stdexcept>
#include <string>

namespace csofp {

enum class ErrorKind {
  InvalidArgument,  // malformed input: bad radius, non-finite value, schema violation
  Precondition,     // mathematically inadmissible request (seed, contraction, geometry)
  Convergence,      // an iteration failed to reach its requested tolerance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class PreconditionFailed : public Error {
 public:
  explicit PreconditionFailed(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& what) : Error(ErrorKind::Convergence, what) {}
};

}  // namespace csofp
