// Copyright 2026 The qrc-floquet Authors
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

namespace qrc {

// Invalid parameters or configuration (dimension cap, bad sweep list, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke a documented precondition (shape mismatch, non-unitary input).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical routine failed or produced a result outside tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: bad magic, truncation, count mismatch.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough data for a requested statistic (e.g. a power-law fit on two bins).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cache file exists under the expected name but its header disagrees.
class CacheMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrc
