#pragma once

#include <stdexcept>

namespace athermal {

// Bad caller-supplied data: wrong dimensions, non-Hermitian input, malformed files.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A solver or iterative procedure failed to meet its contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace athermal
