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

#ifndef IMMUNET_KDJPEG_GENERATOR_H_
#define IMMUNET_KDJPEG_GENERATOR_H_

#include <torch/torch.h>

#include <array>

#include "immunet/nn/unet.h"

namespace immunet::kdjpeg {

// Five-layer MLP from a QF one-hot [N, 6] to the modulation pairs of the
// three leading U-Net blocks. The last layer starts at zero so every pair
// begins as (a, b) = (1, 0).
class QfModulatorImpl : public torch::nn::Module {
 public:
  QfModulatorImpl(std::array<int64_t, 3> channels, int64_t hidden = 64);
  nn::Modulation forward(const torch::Tensor& one_hot);

 private:
  std::array<int64_t, 3> channels_;
  torch::nn::Sequential mlp_{nullptr};
};
TORCH_MODULE(QfModulator);

struct GeneratorOutput {
  torch::Tensor image;                    // pseudo-JPEG, [N, 3, H, W] in [0, 1]
  std::array<torch::Tensor, 3> features;  // phi_0..phi_2
};

// Student or teacher network: QF-modulated U-Net predicting a residual that
// is added to the input and clamped to [0, 1].
class JpegGeneratorImpl : public torch::nn::Module {
 public:
  explicit JpegGeneratorImpl(const nn::UNetOptions& options);

  // `qf_index` holds class indices [N].
  GeneratorOutput forward(const torch::Tensor& x, const torch::Tensor& qf_index);

  // phi_i = a_i * block_i(phi_{i-1}) + b_i for a single block, exposed for
  // inspection and tests.
  static torch::Tensor ModulatedBlock(const torch::Tensor& block_output, const torch::Tensor& scale,
                                      const torch::Tensor& shift);

  nn::UNet unet{nullptr};
  QfModulator modulator{nullptr};
};
TORCH_MODULE(JpegGenerator);

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_GENERATOR_H_
