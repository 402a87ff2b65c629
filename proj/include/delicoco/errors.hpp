#pragma once

#include <stdexcept>
#include <string>

namespace delicoco {

// Invalid user-supplied configuration (bad topology size, bad compressor
// parameter, malformed config file). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke an operation precondition (shape mismatch, asymmetric
// input where symmetry is required). Programming error, not user error.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// An optimization run produced a non-finite or exploding loss.
// CLI exit code 3.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

// File could not be read, parsed, or written. CLI exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace delicoco
