// Copyright 2026 The bentexp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bentexp {

/// Base of every error raised by the library. The CLI maps the three
/// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid option, argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a valid result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Linear system is singular or too badly conditioned to solve.
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bentexp
