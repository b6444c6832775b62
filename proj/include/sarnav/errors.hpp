#pragma once

#include <stdexcept>
#include <string>

namespace sarnav {

/// Input rejected before any work was done (bad parameters, bad config).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure discovered while running a computation on valid-looking input.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeWindowError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class RegistrationError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class DegenerateImageError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace sarnav
