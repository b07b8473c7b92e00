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

#include "immunet/nn/spectral_norm.h"

#include <cmath>

#include "immunet/errors.h"

namespace immunet::nn {

namespace {

thread_local bool g_freeze = false;
constexpr double kSigmaFloor = 1e-8;

}  // namespace

SpectralNormFreeze::SpectralNormFreeze() : previous_(g_freeze) { g_freeze = true; }
SpectralNormFreeze::~SpectralNormFreeze() { g_freeze = previous_; }
bool SpectralNormFreeze::Active() { return g_freeze; }

SNConv2dImpl::SNConv2dImpl(const SNConv2dOptions& options) : options_(options) {
  Require(options.in_channels() > 0 && options.out_channels() > 0, "SNConv2d: channel counts must be positive");
  const int64_t k = options.kernel_size();
  weight = register_parameter("weight", torch::empty({options.out_channels(), options.in_channels(), k, k}));
  const double fan_in = static_cast<double>(options.in_channels() * k * k);
  torch::nn::init::kaiming_uniform_(weight, std::sqrt(5.0));
  if (options.bias()) {
    const double bound = 1.0 / std::sqrt(fan_in);
    bias = register_parameter("bias", torch::empty({options.out_channels()}).uniform_(-bound, bound));
  }
  u_ = register_buffer("u", torch::nn::functional::normalize(
                                 torch::randn({options.out_channels()}),
                                 torch::nn::functional::NormalizeFuncOptions().dim(0).eps(1e-12)));
  v_ = register_buffer("v", torch::nn::functional::normalize(
                                 torch::randn({options.in_channels() * k * k}),
                                 torch::nn::functional::NormalizeFuncOptions().dim(0).eps(1e-12)));
  PowerIterate(15);
}

void SNConv2dImpl::PowerIterate(int iterations) {
  torch::NoGradGuard no_grad;
  namespace F = torch::nn::functional;
  const auto opts = F::NormalizeFuncOptions().dim(0).eps(1e-12);
  auto w = weight.detach().reshape({weight.size(0), -1});
  for (int i = 0; i < iterations; ++i) {
    auto v = F::normalize(torch::mv(w.t(), u_), opts);
    auto u = F::normalize(torch::mv(w, v), opts);
    v_.copy_(v);
    u_.copy_(u);
  }
}

void RefreshSpectralNorm(torch::nn::Module& root, int iterations) {
  if (auto* sn = dynamic_cast<SNConv2dImpl*>(&root)) sn->PowerIterate(iterations);
  for (auto& module : root.modules(/*include_self=*/false)) {
    if (auto* sn = dynamic_cast<SNConv2dImpl*>(module.get())) sn->PowerIterate(iterations);
  }
}

torch::Tensor SNConv2dImpl::NormalizedWeight() {
  auto w = weight.reshape({weight.size(0), -1});
  if (is_training() && !SpectralNormFreeze::Active()) PowerIterate(1);
  // Clones keep later in-place power iterations out of this graph.
  auto sigma = torch::dot(u_.clone(), torch::mv(w, v_.clone()));
  return weight / sigma.clamp_min(kSigmaFloor);
}

torch::Tensor SNConv2dImpl::forward(const torch::Tensor& x) {
  const int64_t pad = options_.padding() < 0 ? options_.kernel_size() / 2 : options_.padding();
  return torch::conv2d(x, NormalizedWeight(), options_.bias() ? bias : torch::Tensor(), options_.stride(), pad);
}

ConvBlockImpl::ConvBlockImpl(int64_t in_channels, int64_t out_channels, int64_t depth) {
  Require(depth >= 1, "ConvBlock: depth must be >= 1");
  for (int64_t i = 0; i < depth; ++i) {
    layers_.push_back(register_module("conv" + std::to_string(i),
                                      SNConv2d(SNConv2dOptions(i == 0 ? in_channels : out_channels, out_channels, 3))));
  }
}

torch::Tensor ConvBlockImpl::forward(torch::Tensor x) {
  for (auto& layer : layers_) x = torch::elu(layer->forward(x));
  return x;
}

}  // namespace immunet::nn
