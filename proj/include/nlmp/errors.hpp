#pragma once

#include <stdexcept>
#include <string>

namespace nlmp {

// Bad geometry, mode counts, or experiment configuration.
class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// gamma at or above the admissible bound lambda1^{m+1}; also raised when a
// Nehari scaling meets a direction with nonpositive quadratic form
// (the "supercritical-gamma direction").
class ThresholdViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semi-implicit time stepping blew up; retry with a smaller dt.
class UnstableStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A radial quadrature or BVP solve failed its refinement/consistency check.
class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A power-law fit did not resolve the asymptotic exponent.
class AsymptoticsNotResolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlmp
