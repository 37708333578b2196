#pragma once

#include <stdexcept>
#include <string>

namespace evotrack {

/// Bad or inconsistent run configuration (CLI flags, config file). Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (edge files, community files). Exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistical fit could not be performed (too few samples, zero variance,
/// constant vectors). Exit code 4.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evotrack
