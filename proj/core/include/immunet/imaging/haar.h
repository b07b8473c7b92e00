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

#ifndef IMMUNET_IMAGING_HAAR_H_
#define IMMUNET_IMAGING_HAAR_H_

#include <torch/torch.h>

namespace immunet::imaging {

// Orthonormal 2x2 Haar analysis. Each input channel c of a [N, C, H, W]
// batch yields four sub-bands stored band-major: output channel b*C + c
// holds band b of channel c, with b in {LL, LH, HL, HH}. For a 2x2 block
// (p q / r s):
//   LL = (p + q + r + s) / 2    LH = (p + q - r - s) / 2
//   HL = (p - q + r - s) / 2    HH = (p - q - r + s) / 2
// Throws ShapeError when H or W is odd.
torch::Tensor HaarDown(const torch::Tensor& x);

// Exact inverse of HaarDown. Throws ShapeError unless C is divisible by 4.
torch::Tensor HaarUp(const torch::Tensor& x);

enum class HaarBand { kLL = 0, kLH = 1, kHL = 2, kHH = 3 };

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_HAAR_H_
