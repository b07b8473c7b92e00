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

#include "immunet/nn/unet.h"

#include "immunet/errors.h"
#include "immunet/imaging/haar.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::nn {

using imaging::HaarDown;
using imaging::HaarUp;

torch::Tensor Modulate(const torch::Tensor& features, const torch::Tensor& scale, const torch::Tensor& shift) {
  return scale.unsqueeze(-1).unsqueeze(-1) * features + shift.unsqueeze(-1).unsqueeze(-1);
}

UNetImpl::UNetImpl(const UNetOptions& options) : options_(options) {
  const int64_t w = options.width;
  const int64_t d = options.block_depth;
  Require(w >= 2 && w % 2 == 0, "UNet: width must be even and >= 2");
  const int64_t lead = 4 * options.in_channels;
  const std::array<std::pair<int64_t, int64_t>, 8> shapes = {{
      {lead, w},           // 0 @ H/2
      {4 * w, 2 * w},      // 1 @ H/4
      {8 * w, 4 * w},      // 2 @ H/8
      {4 * w, 4 * w},      // 3 bottleneck
      {8 * w, 4 * w},      // 4 bottleneck + skip 2
      {w + 2 * w, 2 * w},  // 5 @ H/4, skip 1
      {w / 2 + w, w},      // 6 @ H/2, skip 0
      {w, w},              // 7
  }};
  for (size_t i = 0; i < shapes.size(); ++i) {
    blocks_.push_back(register_module("block" + std::to_string(i), ConvBlock(shapes[i].first, shapes[i].second, d)));
  }
  projection = register_module("projection", torch::nn::Conv2d(torch::nn::Conv2dOptions(w, lead, 3).padding(1)));
}

std::array<int64_t, 3> UNetImpl::ModulatedChannels() const {
  return {options_.width, 2 * options_.width, 4 * options_.width};
}

UNetOutput UNetImpl::forward(const torch::Tensor& x, const Modulation* modulation) {
  imaging::CheckChannels(x, options_.in_channels, "UNet");
  imaging::CheckDivisible(x, 8, "UNet");
  auto modulate = [&](int i, const torch::Tensor& f) {
    if (modulation == nullptr) return f;
    return Modulate(f, modulation->scale[i], modulation->shift[i]);
  };
  UNetOutput out;
  auto f0 = modulate(0, blocks_[0]->forward(HaarDown(x)));
  auto f1 = modulate(1, blocks_[1]->forward(HaarDown(f0)));
  auto f2 = modulate(2, blocks_[2]->forward(HaarDown(f1)));
  auto b = blocks_[3]->forward(f2);
  b = blocks_[4]->forward(torch::cat({b, f2}, 1));
  b = blocks_[5]->forward(torch::cat({HaarUp(b), f1}, 1));
  b = blocks_[6]->forward(torch::cat({HaarUp(b), f0}, 1));
  b = blocks_[7]->forward(b);
  out.out = HaarUp(projection->forward(b));
  out.features = {f0, f1, f2};
  return out;
}

}  // namespace immunet::nn
