#ifndef PSV_ERRORS_HPP
#define PSV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace psv {

/// Invalid user input: configuration keys, density parameters, run sizes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failures that occur while running an otherwise valid configuration.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The chain could not be started inside the support of the target.
class InitializationError : public RunError {
 public:
  using RunError::RunError;
};

/// A sample set has zero spread, so no bandwidth can be formed.
class DegenerateSampleError : public RunError {
 public:
  using RunError::RunError;
};

/// A chain or surrogate violated an invariant the estimators rely on.
class ConsistencyError : public RunError {
 public:
  using RunError::RunError;
};

}  // namespace psv

#endif  // PSV_ERRORS_HPP
