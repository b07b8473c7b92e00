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

#include "immunet/iinet/dsac.h"

#include "immunet/errors.h"

namespace immunet::iinet {

CouplingNetImpl::CouplingNetImpl(int64_t channels, int64_t width) {
  using nn::SNConv2d;
  using nn::SNConv2dOptions;
  hidden_.push_back(register_module("conv0", SNConv2d(SNConv2dOptions(channels, width, 3))));
  for (int i = 1; i < 4; ++i) {
    hidden_.push_back(register_module("conv" + std::to_string(i), SNConv2d(SNConv2dOptions(width, width, 3))));
  }
  output = register_module("output", torch::nn::Conv2d(torch::nn::Conv2dOptions(width, channels, 3).padding(1)));
  torch::nn::init::zeros_(output->weight);
  torch::nn::init::zeros_(output->bias);
}

torch::Tensor CouplingNetImpl::forward(const torch::Tensor& x) {
  auto h1 = torch::elu(hidden_[0]->forward(x));
  auto h2 = torch::elu(hidden_[1]->forward(h1));
  auto h3 = torch::elu(hidden_[2]->forward(h2)) + h1;
  auto h4 = torch::elu(hidden_[3]->forward(h3)) + h2;
  return output->forward(h4);
}

DsacLayerImpl::DsacLayerImpl(int64_t channels, int64_t width, double clamp) : channels_(channels), clamp_(clamp) {
  RequireShape(channels % 2 == 0, "DsacLayer: channel count must be even, got " + std::to_string(channels));
  const int64_t half = channels / 2;
  s1 = register_module("s1", CouplingNet(half, width));
  t1 = register_module("t1", CouplingNet(half, width));
  s2 = register_module("s2", CouplingNet(half, width));
  t2 = register_module("t2", CouplingNet(half, width));
}

torch::Tensor DsacLayerImpl::Scale(CouplingNet& net, const torch::Tensor& x) {
  return torch::exp(clamp_ * torch::tanh(net->forward(x)));
}

torch::Tensor DsacLayerImpl::forward(const torch::Tensor& u) {
  RequireShape(u.dim() == 4 && u.size(1) == channels_,
               "DsacLayer: expected " + std::to_string(channels_) + " channels");
  auto halves = u.chunk(2, 1);
  const auto& u1 = halves[0];
  const auto& u2 = halves[1];
  auto v1 = u1 * Scale(s2, u2) + t2->forward(u2);
  auto v2 = u2 * Scale(s1, v1) + t1->forward(v1);
  return torch::cat({v1, v2}, 1);
}

torch::Tensor DsacLayerImpl::inverse(const torch::Tensor& v) {
  RequireShape(v.dim() == 4 && v.size(1) == channels_,
               "DsacLayer: expected " + std::to_string(channels_) + " channels");
  auto halves = v.chunk(2, 1);
  const auto& v1 = halves[0];
  const auto& v2 = halves[1];
  auto u2 = (v2 - t1->forward(v1)) / Scale(s1, v1);
  auto u1 = (v1 - t2->forward(u2)) / Scale(s2, u2);
  return torch::cat({u1, u2}, 1);
}

}  // namespace immunet::iinet
