// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fpinn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong shapes, malformed configs, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: non-finite values, non-convergence, unphysical states.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpinn
