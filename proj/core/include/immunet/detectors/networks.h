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

#ifndef IMMUNET_DETECTORS_NETWORKS_H_
#define IMMUNET_DETECTORS_NETWORKS_H_

#include <torch/torch.h>

#include <vector>

#include "immunet/nn/spectral_norm.h"
#include "immunet/nn/unet.h"

namespace immunet::detectors {

struct DetectorOptions {
  nn::UNetOptions unet{3, 32, 4};
  // Initial bias of the logit head. Negative values start the detector
  // predicting "untampered" everywhere.
  double head_bias = -2.0;
};

// U-Net with a single sigmoid channel at input resolution. Shared by the
// forgery detector and the pixel-wise discriminator D_B.
class PixelMapNetImpl : public torch::nn::Module {
 public:
  explicit PixelMapNetImpl(const DetectorOptions& options = {});

  // [N, 3, H, W] with H, W divisible by 8 -> [N, 1, H, W] in [0, 1].
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor Logits(const torch::Tensor& x);

  const DetectorOptions& options() const { return options_; }

 private:
  DetectorOptions options_;
  nn::UNet unet_{nullptr};
  torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(PixelMapNet);

// f_M: soft tamper mask of an attacked image.
using ForgeryDetectorImpl = PixelMapNetImpl;
using ForgeryDetector = PixelMapNet;

// D_B: per-pixel real/fake score of a recovered image.
using PixelDiscriminatorImpl = PixelMapNetImpl;
using PixelDiscriminator = PixelMapNet;

struct PatchDiscriminatorOptions {
  int64_t width = 64;
};

// D_A: PatchGAN with 4x4 spectral-normalized convolutions (strides 2, 2, 2,
// 1, 1), 70x70 receptive field, sigmoid scores on the patch grid.
class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(const PatchDiscriminatorOptions& options = {});
  torch::Tensor forward(const torch::Tensor& x);

 private:
  std::vector<nn::SNConv2d> layers_;
};
TORCH_MODULE(PatchDiscriminator);

}  // namespace immunet::detectors

#endif  // IMMUNET_DETECTORS_NETWORKS_H_
