#pragma once

#include <stdexcept>
#include <string>

namespace gnar {

// Bad input: malformed files, inconsistent shapes, contract violations by the caller.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure on valid input: rank deficiency, explosive recursion, singular systems.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gnar
