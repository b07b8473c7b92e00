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

#ifndef IMMUNET_IINET_IINET_H_
#define IMMUNET_IINET_IINET_H_

#include <torch/torch.h>

#include <vector>

#include "immunet/iinet/dsac.h"

namespace immunet::iinet {

struct IINetOptions {
  int64_t levels = 3;
  int64_t layers_per_level = 4;
  int64_t width = 32;
  double clamp = 1.0;
  // 3 image channels + 1 edge channel.
  int64_t in_channels = 4;
};

// Invertible immunization network. Each level applies a Haar down-sampling
// followed by `layers_per_level` DSAC layers; the output is brought back to
// full resolution with the matching Haar up-samplings, so forward maps
// [N, 4, H, W] onto [N, 4, H, W] bijectively. H and W must be divisible by
// 2^levels.
class IINetImpl : public torch::nn::Module {
 public:
  explicit IINetImpl(const IINetOptions& options = {});

  torch::Tensor forward(const torch::Tensor& z);
  torch::Tensor inverse(const torch::Tensor& z);

  const IINetOptions& options() const { return options_; }
  // Channel count seen by the coupling layers of level k (1-based).
  int64_t ChannelsAtLevel(int64_t level) const;

 private:
  IINetOptions options_;
  std::vector<std::vector<DsacLayer>> levels_;
};
TORCH_MODULE(IINet);

struct Immunized {
  torch::Tensor image;         // X, [N, 3, H, W], unclamped
  torch::Tensor null_channel;  // Y, [N, 1, H, W]
};

struct Recovered {
  torch::Tensor image;  // recovered original, [N, 3, H, W]
  torch::Tensor edges;  // recovered edge channel, [N, 1, H, W]
};

// Forward pass on the stack [image; edges].
Immunized Immunize(IINet& net, const torch::Tensor& image, const torch::Tensor& edges);

// Inverse pass on [rectified; null]. An undefined `null_channel` means zeros.
Recovered Recover(IINet& net, const torch::Tensor& rectified, const torch::Tensor& null_channel = {});

}  // namespace immunet::iinet

#endif  // IMMUNET_IINET_IINET_H_
