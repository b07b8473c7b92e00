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

#include "immunet/kdjpeg/generator.h"

#include "immunet/errors.h"
#include "immunet/kdjpeg/qf.h"

namespace immunet::kdjpeg {

QfModulatorImpl::QfModulatorImpl(std::array<int64_t, 3> channels, int64_t hidden) : channels_(channels) {
  const int64_t out = 2 * (channels[0] + channels[1] + channels[2]);
  auto last = torch::nn::Linear(hidden, out);
  torch::nn::init::zeros_(last->weight);
  torch::nn::init::zeros_(last->bias);
  mlp_ = register_module("mlp", torch::nn::Sequential(torch::nn::Linear(kQfClassCount, hidden), torch::nn::ELU(),
                                                      torch::nn::Linear(hidden, hidden), torch::nn::ELU(),
                                                      torch::nn::Linear(hidden, hidden), torch::nn::ELU(),
                                                      torch::nn::Linear(hidden, hidden), torch::nn::ELU(), last));
}

nn::Modulation QfModulatorImpl::forward(const torch::Tensor& one_hot) {
  auto raw = mlp_->forward(one_hot);
  nn::Modulation m;
  int64_t offset = 0;
  for (size_t i = 0; i < 3; ++i) {
    m.scale[i] = 1.0 + raw.narrow(1, offset, channels_[i]);
    offset += channels_[i];
    m.shift[i] = raw.narrow(1, offset, channels_[i]);
    offset += channels_[i];
  }
  return m;
}

JpegGeneratorImpl::JpegGeneratorImpl(const nn::UNetOptions& options) {
  Require(options.in_channels == 3, "JpegGenerator: expects RGB input");
  unet = register_module("unet", nn::UNet(options));
  torch::nn::init::zeros_(unet->projection->weight);
  torch::nn::init::zeros_(unet->projection->bias);
  modulator = register_module("modulator", QfModulator(unet->ModulatedChannels()));
}

torch::Tensor JpegGeneratorImpl::ModulatedBlock(const torch::Tensor& block_output, const torch::Tensor& scale,
                                                const torch::Tensor& shift) {
  return nn::Modulate(block_output, scale, shift);
}

GeneratorOutput JpegGeneratorImpl::forward(const torch::Tensor& x, const torch::Tensor& qf_index) {
  Require(qf_index.dim() == 1 && qf_index.size(0) == x.size(0), "JpegGenerator: one QF index per image");
  auto modulation = modulator->forward(OneHot(qf_index).to(x.options()));
  auto out = unet->forward(x, &modulation);
  return {(x + out.out).clamp(0.0, 1.0), out.features};
}

}  // namespace immunet::kdjpeg
