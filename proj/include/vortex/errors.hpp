#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Observation point coincides with an emitter.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Polarization requested for a zero-intensity field.
class UndefinedPolarization : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A closed-form limit that has no tabulated expression for the inputs.
class UnsupportedCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Phase unwrapping failed: adjacent samples differ by too much.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration file or value. `where` names the field or line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace vortex
