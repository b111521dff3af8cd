#pragma once

#include <stdexcept>
#include <string>

namespace miorder {

// Base class for all toolkit errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-contract input (dimension mismatch, non-Hermitian
// matrix, overlapping blocks, bad normalization, ...).
class invalid_input_error : public error {
 public:
  explicit invalid_input_error(const std::string& msg) : error(msg) {}
};

// Request exceeds a hard size cap (block too large, chain too long).
class capacity_error : public error {
 public:
  explicit capacity_error(const std::string& msg) : error(msg) {}
};

// Iterative solver failed to reach the requested tolerance.
class convergence_error : public error {
 public:
  convergence_error(const std::string& msg, double best_residual)
      : error(msg), best_residual(best_residual) {}
  double best_residual;
};

// Internal numerical postcondition violated (should not happen on valid input).
class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

}  // namespace miorder
