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

#include "immunet/kdjpeg/predictor.h"

#include <array>

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::kdjpeg {

namespace {

// Residuals of 8-bit images are tiny in [0, 1] units; scale them up before
// the learned layers.
constexpr double kResidualGain = 32.0;

}  // namespace

torch::Tensor SrmKernels(int64_t channels) {
  const std::array<std::array<float, 25>, 3> taps = {{
      {0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 2, -4, 2, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0},
      {-1, 2, -2, 2, -1, 2, -6, 8, -6, 2, -2, 8, -12, 8, -2, 2, -6, 8, -6, 2, -1, 2, -2, 2, -1},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, -2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
  }};
  const std::array<float, 3> scale = {1.0f / 4.0f, 1.0f / 12.0f, 1.0f / 2.0f};
  std::vector<torch::Tensor> kernels;
  for (int64_t c = 0; c < channels; ++c) {
    for (size_t k = 0; k < taps.size(); ++k) {
      kernels.push_back(torch::tensor(std::vector<float>(taps[k].begin(), taps[k].end())).view({1, 5, 5}) * scale[k]);
    }
  }
  return torch::stack(kernels);  // [3C, 1, 5, 5]
}

BayarConv2dImpl::BayarConv2dImpl(int64_t in_channels, int64_t out_channels, int64_t kernel) : kernel_(kernel) {
  Require(kernel % 2 == 1, "BayarConv2d: kernel must be odd");
  weight = register_parameter("weight", torch::rand({out_channels, in_channels, kernel, kernel}) * 0.1);
  ApplyConstraint();
}

void BayarConv2dImpl::ApplyConstraint() {
  torch::NoGradGuard no_grad;
  const int64_t c = kernel_ / 2;
  auto flat = weight.view({weight.size(0), weight.size(1), -1});
  const int64_t centre = c * kernel_ + c;
  flat.select(2, centre).zero_();
  auto sum = flat.sum(-1, true);
  // Keep the sign of the ring mass and avoid dividing by ~0.
  auto safe = torch::where(sum.abs() < 1e-6, torch::full_like(sum, 1e-6), sum);
  flat.div_(safe);
  flat.select(2, centre).fill_(-1.0);
}

torch::Tensor BayarConv2dImpl::forward(const torch::Tensor& x) {
  return torch::conv2d(x, weight, {}, 1, kernel_ / 2);
}

QfPredictorImpl::QfPredictorImpl(const QfPredictorOptions& options) {
  const int64_t w = options.width;
  vanilla = register_module("vanilla", torch::nn::Conv2d(torch::nn::Conv2dOptions(3, 8, 5).padding(2)));
  bayar = register_module("bayar", BayarConv2d(3, 3, 5));
  srm_ = register_buffer("srm", SrmKernels(3));
  const int64_t front = 8 + 9 + 3;
  using torch::nn::Conv2dOptions;
  fcn = register_module("fcn", torch::nn::Sequential(
                                   torch::nn::Conv2d(Conv2dOptions(front, w, 8).stride(8)), torch::nn::ELU(),
                                   torch::nn::Conv2d(Conv2dOptions(w, 2 * w, 3).padding(1)), torch::nn::ELU(),
                                   torch::nn::Conv2d(Conv2dOptions(2 * w, 2 * w, 3).stride(2).padding(1)),
                                   torch::nn::ELU()));
  head = register_module("head", torch::nn::Sequential(torch::nn::Linear(2 * w, 64), torch::nn::ELU(),
                                                       torch::nn::Linear(64, 32), torch::nn::ELU(),
                                                       torch::nn::Linear(32, 6)));
}

torch::Tensor QfPredictorImpl::forward(const torch::Tensor& x) {
  imaging::CheckChannels(x, 3, "QfPredictor");
  imaging::CheckDivisible(x, 8, "QfPredictor");
  namespace F = torch::nn::functional;
  auto srm = F::conv2d(x, srm_, F::Conv2dFuncOptions().padding(2).groups(3));
  auto features = torch::cat({vanilla->forward(x * 2.0 - 1.0), srm * kResidualGain, bayar->forward(x) * kResidualGain}, 1);
  auto pooled = fcn->forward(features).mean({2, 3});
  return head->forward(pooled);
}

torch::Tensor QfPredictorImpl::Probabilities(const torch::Tensor& x) { return torch::softmax(forward(x), 1); }

}  // namespace immunet::kdjpeg
