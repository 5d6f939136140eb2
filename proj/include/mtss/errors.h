// Copyright 2026 The MTSS Authors.
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

#ifndef MTSS_ERRORS_H_
#define MTSS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mtss {

// Root of every error thrown by the library. The CLI maps each subclass to a
// process exit code (see ExitCodeFor in cli/commands.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. calling backward on a non-scalar.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or inconsistent dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (embedding files, checkpoints, GloVe text).
class FormatError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced during forward or training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtss

#endif  // MTSS_ERRORS_H_
