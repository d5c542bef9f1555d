#pragma once

#include <stdexcept>
#include <string>

namespace emakit {

// Invalid configuration or API misuse (bad fractions, wrong link kind).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV rows, model documents).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Feature row incompatible with the schema a model was trained on.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace emakit
