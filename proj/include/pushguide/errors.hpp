#pragma once

#include <stdexcept>
#include <string>

namespace pushguide {

/// Invalid or inconsistent user input (config file, CLI overrides).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested evaluation leaves the model's validity domain.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A quadrature or root-finding routine failed to converge.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pushguide
