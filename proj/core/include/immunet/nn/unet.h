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

#ifndef IMMUNET_NN_UNET_H_
#define IMMUNET_NN_UNET_H_

#include <torch/torch.h>

#include <array>
#include <vector>

#include "immunet/nn/spectral_norm.h"

namespace immunet::nn {

struct UNetOptions {
  int64_t in_channels = 3;
  // Channels of the first block; deeper blocks use 2x and 4x. Must be even.
  int64_t width = 32;
  // Conv layers per block.
  int64_t block_depth = 4;
};

// Per-sample affine modulation (a_i, b_i) for the three leading blocks,
// each [N, C_i].
struct Modulation {
  std::array<torch::Tensor, 3> scale;
  std::array<torch::Tensor, 3> shift;
};

// phi = scale * f + shift with per-channel [N, C] scale/shift.
torch::Tensor Modulate(const torch::Tensor& features, const torch::Tensor& scale, const torch::Tensor& shift);

struct UNetOutput {
  torch::Tensor out;                      // [N, in_channels, H, W]
  std::array<torch::Tensor, 3> features;  // outputs of the leading blocks
};

// U-shaped FCN with eight conv blocks. Haar transforms replace pooling and
// transposed convolutions: the input is Haar-decomposed (3 -> 12 channels)
// before the first block and the last block emits 4 * in_channels channels
// that a Haar synthesis returns to full resolution. H and W must be
// divisible by 8.
class UNetImpl : public torch::nn::Module {
 public:
  explicit UNetImpl(const UNetOptions& options);

  UNetOutput forward(const torch::Tensor& x, const Modulation* modulation = nullptr);

  // Channel counts of the three modulated blocks.
  std::array<int64_t, 3> ModulatedChannels() const;
  const UNetOptions& options() const { return options_; }

  // Plain output projection of the last block; zero-initialised by callers
  // that want the network to start as a residual identity.
  torch::nn::Conv2d projection{nullptr};

 private:
  UNetOptions options_;
  std::vector<ConvBlock> blocks_;
};
TORCH_MODULE(UNet);

}  // namespace immunet::nn

#endif  // IMMUNET_NN_UNET_H_
