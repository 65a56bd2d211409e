#pragma once

#include <stdexcept>
#include <string>

namespace expins {

// Bad input: parameters outside their domain, malformed configs, shape
// mismatches. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine could not deliver its contract (no bracket, singular
// conditioning). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace expins
