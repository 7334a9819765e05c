#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (formula, execution, alphabet, machine, JSON).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)),
        position_(position) {}
  explicit ParseError(const std::string& what)
      : Error(what), position_(npos) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arguments that violate an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An explicit resource budget was exhausted; never converted into a verdict.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace pvg
