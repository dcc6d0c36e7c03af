#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace errmodel {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be read or understood (I/O, CSV, JSON, configuration).
class InputError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

/// A CSV cell or row that failed to parse or validate.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : InputError("row " + std::to_string(row) + ", column '" + column +
                   "': " + what),
        row_(row),
        column_(std::move(column)) {}

  /// 1-based data row (header and comment lines are not counted).
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// A budget component whose unit cannot be combined with its sensitivity.
class UnitError : public InputError {
 public:
  UnitError(std::string component, const std::string& what)
      : InputError("component '" + component + "': " + what),
        component_(std::move(component)) {}

  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

/// Numerical failure: not enough data for the requested estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The normal equations are singular at working precision.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}

  /// Elimination step (0-based) at which the pivot fell below threshold.
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace errmodel
