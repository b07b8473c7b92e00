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

#include "immunet/kdjpeg/qf.h"

#include <cstdlib>

#include "immunet/errors.h"

namespace immunet::kdjpeg {

QfClass QfClass::FromQuality(int quality) {
  for (size_t i = 0; i < kQfLabels.size(); ++i) {
    if (kQfLabels[i] == quality) return QfClass(static_cast<int64_t>(i));
  }
  throw ContractError("QF " + std::to_string(quality) + " is not one of {10, 30, 50, 70, 90, 100}");
}

QfClass QfClass::FromIndex(int64_t index) {
  Require(index >= 0 && index < kQfClassCount, "QF class index out of range");
  return QfClass(index);
}

QfClass QfClass::Nearest(int quality) {
  size_t best = 0;
  for (size_t i = 1; i < kQfLabels.size(); ++i) {
    if (std::abs(kQfLabels[i] - quality) < std::abs(kQfLabels[best] - quality)) best = i;
  }
  return QfClass(static_cast<int64_t>(best));
}

torch::Tensor OneHot(const torch::Tensor& indices) {
  return torch::one_hot(indices.to(torch::kLong), kQfClassCount).to(torch::kFloat);
}

}  // namespace immunet::kdjpeg
