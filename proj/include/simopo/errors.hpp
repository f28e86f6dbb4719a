#pragma once

#include <stdexcept>
#include <string>

namespace simopo {

// Root of every error raised by the library. The CLI maps the three families
// below onto exit codes 2 (config), 3 (physics/domain) and 4 (numerical).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Physics / domain family (exit code 3).
class DomainError : public Error {
 public:
  using Error::Error;
};
class UsageError : public DomainError {
 public:
  using DomainError::DomainError;
};
class ResolutionError : public DomainError {
 public:
  ResolutionError(const std::string& message, double ratio) : DomainError(message), ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};
class AboveThresholdError : public DomainError {
 public:
  using DomainError::DomainError;
};
class ThresholdSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};
class UnsupportedError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Numerical family (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};
class DataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace simopo
