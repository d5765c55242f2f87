#ifndef PATHTHERM_ERROR_HPP
#define PATHTHERM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paththerm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad network text, unknown preset,
/// invalid arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in the network description format. Line and column are
/// 1-based; column 0 means "whole line".
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column, const std::string& file = {})
      : InputError((file.empty() ? std::string() : file + ": ") + "line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A numerical procedure could not deliver a trustworthy result: reducible
/// chain, solver residual too large, truncation too small, undefined path
/// functional.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace paththerm

#endif  // PATHTHERM_ERROR_HPP
