#pragma once

#include <stdexcept>
#include <string>

namespace pslshade {

/// Invalid user-supplied configuration (dimension, budget, config file).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (records, stores, metric inputs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A contract that the algorithm itself must uphold was broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The objective returned NaN or infinity.
class NonFiniteEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pslshade
