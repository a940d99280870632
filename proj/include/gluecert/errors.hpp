#pragma once

#include <stdexcept>
#include <string>

namespace gluecert {

// Invalid arguments, violated preconditions, malformed files.
class DomainError : public std::invalid_argument {
public:
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A scheme rule could not be evaluated on concrete data (degenerate window,
// non-finite result).  Carries the window/point context when known.
class SchemeEvalError : public std::runtime_error {
public:
  explicit SchemeEvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by interval operations whose domain condition cannot be decided on
// the given box (division by a zero-straddling interval, sqrt of a partially
// negative interval).  Branch-and-bound drivers catch this and split the box.
class BoxUndecidable : public std::runtime_error {
public:
  BoxUndecidable() : std::runtime_error("box undecidable") {}
  explicit BoxUndecidable(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gluecert
