#pragma once

#include <stdexcept>
#include <string>

namespace jumpvel {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor extents.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value or diverging computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied data violates a precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Text parse failure with 1-based line and column.
class ParseError : public FormatError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : FormatError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// File system failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double violation) : Error(what), violation_(violation) {}
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

/// Synthetic figure does not fit inside the frame.
class RenderError : public Error {
 public:
  using Error::Error;
};

/// Pearson correlation requested for a constant vector.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace jumpvel
