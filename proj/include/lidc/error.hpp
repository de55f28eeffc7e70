#pragma once

#include <stdexcept>
#include <string>

namespace lidc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (corpus files, vectors, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: feature specs out of range, bad hyperparameters,
// duplicate ensemble members.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Model file could not be read, parsed or validated.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace lidc
