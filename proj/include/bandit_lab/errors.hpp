#pragma once

#include <stdexcept>
#include <string>

namespace bandit_lab {

// Support violations, out-of-range parameters for numeric kernels.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shape disagreements between policies, distributions and environments.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid experiment / environment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Files that cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bandit_lab
