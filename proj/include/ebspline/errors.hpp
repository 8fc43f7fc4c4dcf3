#pragma once

#include <stdexcept>
#include <string>

namespace ebs {

// Bad arguments or malformed input. The CLI maps these to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedBackend : InputError {
  using InputError::InputError;
};

// Numerical breakdown. The CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInput : NumericError {
  using NumericError::NumericError;
};

}  // namespace ebs
