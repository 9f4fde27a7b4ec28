#pragma once

#include <stdexcept>

namespace bethe {

// Invalid user-supplied configuration or parameters. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A hard assertion of a verification check failed. Maps to CLI exit code 2.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: singular solve, non-convergence, overflow. Exit code 3.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bethe
