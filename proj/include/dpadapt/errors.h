//
// Copyright 2026 The dpadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPADAPT_ERRORS_H_
#define DPADAPT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpadapt {

// Caller broke a documented precondition (bad range, empty input, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical inverse was asked for a value outside the achievable range.
class NoSolutionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or out-of-range input data (CSV schema, p-value range, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed: threshold monotonicity, a stalled updater,
// counter bookkeeping mismatch.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MonotonicityViolation : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class StallError : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

// Throws ContractViolation with `message` unless `condition` holds.
inline void Require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace dpadapt

#endif  // DPADAPT_ERRORS_H_
