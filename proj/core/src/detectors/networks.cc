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

#include "immunet/detectors/networks.h"

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::detectors {

namespace F = torch::nn::functional;

PixelMapNetImpl::PixelMapNetImpl(const DetectorOptions& options) : options_(options) {
  Require(options.unet.in_channels == 3, "PixelMapNet: expects RGB input");
  unet_ = register_module("unet", nn::UNet(options.unet));
  head_ = register_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(3, 1, 3).padding(1)));
  torch::NoGradGuard no_grad;
  head_->bias.fill_(options.head_bias);
}

torch::Tensor PixelMapNetImpl::Logits(const torch::Tensor& x) {
  auto b = imaging::AsBatch(x);
  return head_->forward(unet_->forward(b).out);
}

torch::Tensor PixelMapNetImpl::forward(const torch::Tensor& x) { return torch::sigmoid(Logits(x)); }

PatchDiscriminatorImpl::PatchDiscriminatorImpl(const PatchDiscriminatorOptions& options) {
  const int64_t w = options.width;
  Require(w > 0, "PatchDiscriminator: width must be positive");
  const std::array<std::array<int64_t, 3>, 5> spec = {{
      {3, w, 2}, {w, 2 * w, 2}, {2 * w, 4 * w, 2}, {4 * w, 8 * w, 1}, {8 * w, 1, 1}}};
  for (size_t i = 0; i < spec.size(); ++i) {
    auto opts = nn::SNConv2dOptions(spec[i][0], spec[i][1], 4).stride(spec[i][2]).padding(1);
    layers_.push_back(register_module("conv" + std::to_string(i), nn::SNConv2d(opts)));
  }
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& x) {
  auto h = imaging::AsBatch(x);
  imaging::CheckChannels(h, 3, "PatchDiscriminator");
  for (size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i]->forward(h);
    if (i + 1 < layers_.size()) h = F::leaky_relu(h, F::LeakyReLUFuncOptions().negative_slope(0.2));
  }
  return torch::sigmoid(h);
}

}  // namespace immunet::detectors
