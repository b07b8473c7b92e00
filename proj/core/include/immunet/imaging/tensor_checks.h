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

#ifndef IMMUNET_IMAGING_TENSOR_CHECKS_H_
#define IMMUNET_IMAGING_TENSOR_CHECKS_H_

#include <torch/torch.h>

#include <string>

namespace immunet::imaging {

// Images travel as float tensors shaped [N, C, H, W] with values in [0, 1].
// A single image is the N == 1 case; helpers below accept [C, H, W] too and
// promote it.

torch::Tensor AsBatch(const torch::Tensor& x);

void CheckBatch(const torch::Tensor& x, const std::string& what);
void CheckChannels(const torch::Tensor& x, int64_t channels, const std::string& what);
void CheckSameShape(const torch::Tensor& a, const torch::Tensor& b, const std::string& what);
void CheckDivisible(const torch::Tensor& x, int64_t divisor, const std::string& what);

// Binary masks carry only 0 and 1.
bool IsBinary(const torch::Tensor& mask);

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_TENSOR_CHECKS_H_
