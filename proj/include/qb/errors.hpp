#pragma once

#include <stdexcept>

namespace qb {

// Inputs violate a documented precondition or invariant.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An engine failed mid-computation (instability, ill-conditioning).
struct engine_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration input.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qb
