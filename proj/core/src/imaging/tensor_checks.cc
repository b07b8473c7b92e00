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

#include "immunet/imaging/tensor_checks.h"

#include <sstream>

#include "immunet/errors.h"

namespace immunet::imaging {

namespace {

std::string ShapeString(const torch::Tensor& x) {
  std::ostringstream os;
  os << x.sizes();
  return os.str();
}

}  // namespace

torch::Tensor AsBatch(const torch::Tensor& x) {
  if (x.dim() == 3) return x.unsqueeze(0);
  return x;
}

void CheckBatch(const torch::Tensor& x, const std::string& what) {
  RequireShape(x.defined() && x.dim() == 4,
               what + ": expected [N, C, H, W], got " + (x.defined() ? ShapeString(x) : "undefined"));
}

void CheckChannels(const torch::Tensor& x, int64_t channels, const std::string& what) {
  CheckBatch(x, what);
  Require(x.size(1) == channels, what + ": expected " + std::to_string(channels) + " channels, got " +
                                     std::to_string(x.size(1)));
}

void CheckSameShape(const torch::Tensor& a, const torch::Tensor& b, const std::string& what) {
  RequireShape(a.sizes() == b.sizes(), what + ": shape mismatch " + ShapeString(a) + " vs " + ShapeString(b));
}

void CheckDivisible(const torch::Tensor& x, int64_t divisor, const std::string& what) {
  CheckBatch(x, what);
  RequireShape(x.size(2) % divisor == 0 && x.size(3) % divisor == 0,
               what + ": spatial size " + ShapeString(x) + " not divisible by " + std::to_string(divisor));
}

bool IsBinary(const torch::Tensor& mask) {
  return torch::logical_or(mask == 0, mask == 1).all().item<bool>();
}

}  // namespace immunet::imaging
