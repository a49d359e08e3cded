// include/distill/errors.hpp

// Copyright 2026  The distill-nmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DISTILL_ERRORS_HPP_
#define DISTILL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace distill {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid settings: bad sizes, thresholds, dims that cannot work together.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a precondition (mismatched files, bad UTF-8,
/// empty references, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Stored artifacts that cannot be trusted: out-of-range ids, truncated
/// or mis-versioned checkpoints.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values showing up during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace distill

#endif  // DISTILL_ERRORS_HPP_
