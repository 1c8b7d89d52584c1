#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phr {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grammar, table or automaton violates a structural invariant.
class GrammarError : public Error {
 public:
  using Error::Error;
};

/// A transform was called with inputs outside its contract.
class TransformError : public Error {
 public:
  using Error::Error;
};

/// Text or JSON input could not be parsed. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(format(line, column, message)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& message) {
    if (line == 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace phr
