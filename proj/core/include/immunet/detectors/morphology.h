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

#ifndef IMMUNET_DETECTORS_MORPHOLOGY_H_
#define IMMUNET_DETECTORS_MORPHOLOGY_H_

#include <torch/torch.h>

namespace immunet::detectors {

// Kernel sizes are tuned for 512x512 inputs.
inline constexpr int64_t kReferenceResolution = 512;

struct MaskPostprocessParams {
  double threshold = 0.2;
  int64_t erosion = 8;
  int64_t dilation = 16;

  // Same threshold with both kernels scaled by resolution / 512, at least 1.
  static MaskPostprocessParams ForResolution(int64_t resolution);
  // Throws ContractError unless 0 < threshold < 1 and kernels are positive.
  void Validate() const;
};

// Square windows of side k cover offsets [-k/2, k - 1 - k/2] around the
// anchor, which is OpenCV's convention for even k. Pixels beyond the border
// count as 0 for both operations. Masks are [N, 1, H, W] or [1, H, W].

torch::Tensor Binarize(const torch::Tensor& soft, double threshold);  // 1 where soft > threshold
torch::Tensor Erode(const torch::Tensor& binary, int64_t kernel);
torch::Tensor Dilate(const torch::Tensor& binary, int64_t kernel);

// Binarize, erode, dilate. Pure; no autograd.
torch::Tensor PostprocessMask(const torch::Tensor& soft, const MaskPostprocessParams& params);

// Forward equals PostprocessMask; the gradient passes straight to `soft`.
torch::Tensor PostprocessMaskSte(const torch::Tensor& soft, const MaskPostprocessParams& params);

// X_atk * (1 - mask). The mask broadcasts over channels.
torch::Tensor Rectify(const torch::Tensor& attacked, const torch::Tensor& mask);

}  // namespace immunet::detectors

#endif  // IMMUNET_DETECTORS_MORPHOLOGY_H_
