#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrcd {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A variable has zero robust scale (more than half of its values are tied).
class DegenerateVariableError : public Error {
 public:
  DegenerateVariableError(std::size_t column, std::string name)
      : Error("degenerate variable " +
              (name.empty() ? std::to_string(column + 1) : name) +
              ": robust scale is zero"),
        column_(column),
        name_(std::move(name)) {}

  std::size_t column() const noexcept { return column_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t column_;
  std::string name_;
};

/// Subset size outside [n/2, n] or otherwise unusable.
class SubsetSizeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible or positive definite is not.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Target matrix rejected by validation.
class TargetError : public Error {
 public:
  using Error::Error;
};

/// Input file unreadable or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Simulation config violates its schema; carries every offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys)
      : Error(what), keys_(std::move(keys)) {}

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace mrcd
