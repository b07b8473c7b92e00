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

#ifndef IMMUNET_ATTACK_POSTPROCESS_H_
#define IMMUNET_ATTACK_POSTPROCESS_H_

#include <torch/torch.h>

#include "immunet/attack/plan.h"

namespace immunet::attack {

// JPEG as seen by the attack layer: a learned simulator during training, a
// real codec during evaluation. Implementations must keep gradients
// flowing to the input (straight-through where the forward is a codec).
class JpegSimulator {
 public:
  virtual ~JpegSimulator() = default;
  virtual torch::Tensor Compress(const torch::Tensor& image, int quality) = 0;
};

struct PostResult {
  torch::Tensor image;  // [N, C, H, W]
  // Cropping keeps the canvas size: pixels outside the retained window are
  // zeroed and `crop` records the window. ExtractCrop cuts the plane out.
  CropGeometry crop;
};

torch::Tensor GaussianBlur(const torch::Tensor& x, double sigma);
// Median filter with a straight-through gradient.
torch::Tensor MedianBlur(const torch::Tensor& x, int kernel);
// Bilinear resize by `factor` (antialiased when shrinking) and back.
torch::Tensor RescaleRoundTrip(const torch::Tensor& x, double factor);
torch::Tensor AddGaussianNoise(const torch::Tensor& x, double sigma, uint64_t seed);
// Zeroes whole pixels (all channels) with probability `rate`.
torch::Tensor PixelDropout(const torch::Tensor& x, double rate, uint64_t seed);
// Window of `area` fraction of the canvas, 8-aligned, placed from `seed`.
CropGeometry SampleCropWindow(int64_t height, int64_t width, double area, uint64_t seed);
torch::Tensor ZeroOutsideCrop(const torch::Tensor& x, const CropGeometry& crop);
torch::Tensor ExtractCrop(const torch::Tensor& x, const CropGeometry& crop);
// [.., 1, H, W] indicator of the retained window (all ones when inactive).
torch::Tensor CropValidity(const torch::Tensor& like, const CropGeometry& crop);

// Benign post-processing IP(.). `jpeg` may be null unless kind == kJpeg.
// Throws ContractError for out-of-range parameters.
PostResult Postprocess(const torch::Tensor& x, PostKind kind, const PostParams& params, JpegSimulator* jpeg);

}  // namespace immunet::attack

#endif  // IMMUNET_ATTACK_POSTPROCESS_H_
