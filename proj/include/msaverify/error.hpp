#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msaverify {

/// Root of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model failed structural validation where a valid one was required.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Lexical or syntactic failure while reading a model file or DSL source.
/// Line and column are 1-based; zero means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input whose shape does not match the model schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A DSL statement names an endpoint, entity or role that was never declared.
class ReferenceError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Requested constraint generation is incoherent (missing tau, missing auth data, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to an external SMT solver process.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace msaverify
