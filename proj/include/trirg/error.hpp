#pragma once

#include <stdexcept>
#include <string>

namespace trirg {

// Bad input: out-of-range counts, malformed files, inconsistent configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver non-convergence, missing brackets, ill-posed fits.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A kept multiplet whose dimension differs from what the truncation expects.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace trirg
