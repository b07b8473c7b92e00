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

#include "immunet/iinet/iinet.h"

#include "immunet/errors.h"
#include "immunet/imaging/haar.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::iinet {

IINetImpl::IINetImpl(const IINetOptions& options) : options_(options) {
  Require(options.levels >= 1 && options.layers_per_level >= 1 && options.width >= 1,
          "IINet: levels, layers_per_level and width must be positive");
  for (int64_t level = 1; level <= options.levels; ++level) {
    std::vector<DsacLayer> layers;
    for (int64_t k = 0; k < options.layers_per_level; ++k) {
      layers.push_back(register_module("level" + std::to_string(level) + "_dsac" + std::to_string(k),
                                       DsacLayer(ChannelsAtLevel(level), options.width, options.clamp)));
    }
    levels_.push_back(std::move(layers));
  }
}

int64_t IINetImpl::ChannelsAtLevel(int64_t level) const {
  int64_t c = options_.in_channels;
  for (int64_t k = 0; k < level; ++k) c *= 4;
  return c;
}

torch::Tensor IINetImpl::forward(const torch::Tensor& z) {
  imaging::CheckChannels(z, options_.in_channels, "IINet::forward");
  imaging::CheckDivisible(z, int64_t{1} << options_.levels, "IINet::forward");
  auto x = z;
  for (auto& level : levels_) {
    x = imaging::HaarDown(x);
    for (auto& layer : level) x = layer->forward(x);
  }
  for (size_t k = 0; k < levels_.size(); ++k) x = imaging::HaarUp(x);
  return x;
}

torch::Tensor IINetImpl::inverse(const torch::Tensor& z) {
  imaging::CheckChannels(z, options_.in_channels, "IINet::inverse");
  imaging::CheckDivisible(z, int64_t{1} << options_.levels, "IINet::inverse");
  nn::SpectralNormFreeze freeze;
  auto x = z;
  for (size_t k = 0; k < levels_.size(); ++k) x = imaging::HaarDown(x);
  for (auto level = levels_.rbegin(); level != levels_.rend(); ++level) {
    for (auto layer = level->rbegin(); layer != level->rend(); ++layer) x = (*layer)->inverse(x);
    x = imaging::HaarUp(x);
  }
  return x;
}

Immunized Immunize(IINet& net, const torch::Tensor& image, const torch::Tensor& edges) {
  auto i = imaging::AsBatch(image);
  auto e = imaging::AsBatch(edges);
  imaging::CheckChannels(i, 3, "Immunize(image)");
  imaging::CheckChannels(e, 1, "Immunize(edges)");
  auto out = net->forward(torch::cat({i, e}, 1));
  return {out.narrow(1, 0, 3), out.narrow(1, 3, 1)};
}

Recovered Recover(IINet& net, const torch::Tensor& rectified, const torch::Tensor& null_channel) {
  auto x = imaging::AsBatch(rectified);
  imaging::CheckChannels(x, 3, "Recover(rectified)");
  auto o = null_channel.defined() ? imaging::AsBatch(null_channel)
                                  : torch::zeros({x.size(0), 1, x.size(2), x.size(3)}, x.options());
  auto out = net->inverse(torch::cat({x, o}, 1));
  return {out.narrow(1, 0, 3), out.narrow(1, 3, 1)};
}

}  // namespace immunet::iinet
