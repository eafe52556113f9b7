#pragma once

#include <stdexcept>
#include <string>

namespace blowuplab {

/// Bad input: violated preconditions, malformed options or config files.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter regime the theorems do not cover (e.g. delta < 0).
class unsupported_regime : public validation_error {
 public:
  using validation_error::validation_error;
};

/// An iterative method failed: no bracket, no convergence, non-finite values.
class numerical_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blowuplab
