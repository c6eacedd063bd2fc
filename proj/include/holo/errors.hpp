// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace holo {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, matrices, vote tables).
// The CLI maps this to exit code 2.
struct DataError : Error {
  using Error::Error;
};

// Parameter outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

}  // namespace holo
