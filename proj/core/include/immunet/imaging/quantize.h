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

#ifndef IMMUNET_IMAGING_QUANTIZE_H_
#define IMMUNET_IMAGING_QUANTIZE_H_

#include <torch/torch.h>

namespace immunet::imaging {

// Forward: returns `value` exactly. Backward: routes the incoming gradient
// to `input` unchanged. `value` receives no gradient.
torch::Tensor StraightThrough(const torch::Tensor& input, const torch::Tensor& value);

// round(clamp(x, 0, 1) * 255) / 255 with ties rounded away from zero.
// No autograd involvement.
torch::Tensor Quantize8Bit(const torch::Tensor& x);

// 8-bit quantization with an identity gradient (also across the clamp).
torch::Tensor QuantizeSte(const torch::Tensor& x);

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_QUANTIZE_H_
