#pragma once

#include <stdexcept>
#include <string>

namespace flowcritic {

// Non-finite values encountered where the math requires finite ones
// (exploding ratios, NaN losses, diverging ODE states). Callers treat
// this class separately from configuration/usage errors.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called in the wrong order (backward before forward,
// loss before a target snapshot exists, maps before training).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace flowcritic
