// Copyright 2026 The Immunet Authors. All Rights Reserved.
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

#ifndef IMMUNET_ERRORS_H_
#define IMMUNET_ERRORS_H_

#include <stdexcept>
#include <string>

namespace immunet {

// Raised when a caller violates an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Tensor shape or divisibility violation.
class ShapeError : public ContractError {
 public:
  explicit ShapeError(const std::string& what) : ContractError(what) {}
};

// Training produced a non-finite value or diverged.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

inline void RequireShape(bool condition, const std::string& message) {
  if (!condition) throw ShapeError(message);
}

}  // namespace immunet

#endif  // IMMUNET_ERRORS_H_
