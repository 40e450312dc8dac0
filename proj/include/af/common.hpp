// Copyright (c) 2026 afbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace af {

// Error taxonomy. The CLI maps these onto process exit codes:
// ParamError -> 2 (usage), DataError/FormatError/IoError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument values (bad attack parameter, bad config field).
struct ParamError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (manifests, WAV containers, checkpoints).
struct DataError : Error {
  using Error::Error;
};

// Unparseable file contents.
struct FormatError : DataError {
  using DataError::DataError;
};

// Filesystem failures.
struct IoError : DataError {
  using DataError::DataError;
};

// Non-finite activations, degenerate gradients, undefined metrics.
struct NumericError : Error {
  using Error::Error;
};

// Tensor/grid dimension mismatches.
struct ShapeError : Error {
  using Error::Error;
};

}  // namespace af
