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

#ifndef IMMUNET_IMAGING_CANNY_H_
#define IMMUNET_IMAGING_CANNY_H_

#include <torch/torch.h>

namespace immunet::imaging {

struct CannyOptions {
  double sigma = 1.0;
  // Hysteresis thresholds relative to the maximum gradient magnitude.
  double low_ratio = 0.1;
  double high_ratio = 0.2;
};

// Canny edges of the luminance of a 3-channel batch [N, 3, H, W].
// Returns a {0,1} float map [N, 1, H, W]. Throws ContractError for other
// channel counts.
torch::Tensor CannyEdge(const torch::Tensor& image, const CannyOptions& options = {});

// Rec.601 luma of a [N, 3, H, W] batch, keeping a singleton channel.
torch::Tensor Luminance(const torch::Tensor& image);

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_CANNY_H_
