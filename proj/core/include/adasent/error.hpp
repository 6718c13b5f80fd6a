#pragma once

#include <stdexcept>
#include <string>

namespace adasent {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied data the library cannot use (bad file, bad label, bad
/// config). The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : InputError(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : InputError(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class EmptySentenceError : public InputError {
 public:
  EmptySentenceError() : InputError("empty sentence: no tokens after tokenization") {}
  using InputError::InputError;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class InvalidLabelError : public InputError {
 public:
  using InputError::InputError;
};

/// Training hit a non-finite objective or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace adasent
