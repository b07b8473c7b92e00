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

#ifndef IMMUNET_NN_SPECTRAL_NORM_H_
#define IMMUNET_NN_SPECTRAL_NORM_H_

#include <torch/torch.h>

namespace immunet::nn {

// While alive, spectral-norm layers on this thread skip their power-iteration
// update and reuse the stored singular vectors. Inverse passes of the
// invertible network hold one so they see the same weights as the forward.
class SpectralNormFreeze {
 public:
  SpectralNormFreeze();
  ~SpectralNormFreeze();
  SpectralNormFreeze(const SpectralNormFreeze&) = delete;
  SpectralNormFreeze& operator=(const SpectralNormFreeze&) = delete;

  static bool Active();

 private:
  bool previous_;
};

struct SNConv2dOptions {
  SNConv2dOptions(int64_t in, int64_t out, int64_t kernel) : in_channels_(in), out_channels_(out), kernel_size_(kernel) {}
  TORCH_ARG(int64_t, in_channels);
  TORCH_ARG(int64_t, out_channels);
  TORCH_ARG(int64_t, kernel_size);
  TORCH_ARG(int64_t, stride) = 1;
  // -1 selects kernel_size / 2.
  TORCH_ARG(int64_t, padding) = -1;
  TORCH_ARG(bool, bias) = true;
};

// 2-D convolution whose weight is divided by its largest singular value,
// estimated with one power iteration per training forward.
class SNConv2dImpl : public torch::nn::Module {
 public:
  explicit SNConv2dImpl(const SNConv2dOptions& options);

  torch::Tensor forward(const torch::Tensor& x);

  // Weight actually applied, W / sigma(W).
  torch::Tensor NormalizedWeight();
  // Runs power iterations on the stored singular vectors without touching
  // the autograd graph.
  void PowerIterate(int iterations);

  torch::Tensor weight;
  torch::Tensor bias;

 private:
  SNConv2dOptions options_;
  torch::Tensor u_;
  torch::Tensor v_;
};
TORCH_MODULE(SNConv2d);

// PowerIterate on every spectral-norm layer below `root`; needed after
// parameters are overwritten outside of training.
void RefreshSpectralNorm(torch::nn::Module& root, int iterations = 15);

// Stack of `depth` spectral-normalized 3x3 convolutions, each followed by ELU.
class ConvBlockImpl : public torch::nn::Module {
 public:
  ConvBlockImpl(int64_t in_channels, int64_t out_channels, int64_t depth);
  torch::Tensor forward(torch::Tensor x);

 private:
  std::vector<SNConv2d> layers_;
};
TORCH_MODULE(ConvBlock);

}  // namespace immunet::nn

#endif  // IMMUNET_NN_SPECTRAL_NORM_H_
