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

#ifndef IMMUNET_KDJPEG_PREDICTOR_H_
#define IMMUNET_KDJPEG_PREDICTOR_H_

#include <torch/torch.h>

namespace immunet::kdjpeg {

// Three fixed SRM residual kernels (5x5) applied depthwise to each input
// channel: [3 * channels, 1, 5, 5].
torch::Tensor SrmKernels(int64_t channels);

// Bayar constrained convolution: every (out, in) 5x5 kernel has centre -1
// and its remaining taps sum to 1. Call ApplyConstraint() after each
// optimizer step.
class BayarConv2dImpl : public torch::nn::Module {
 public:
  BayarConv2dImpl(int64_t in_channels, int64_t out_channels, int64_t kernel = 5);
  torch::Tensor forward(const torch::Tensor& x);
  void ApplyConstraint();

  torch::Tensor weight;

 private:
  int64_t kernel_;
};
TORCH_MODULE(BayarConv2d);

struct QfPredictorOptions {
  int64_t width = 32;
};

// QF classifier: parallel vanilla / SRM / Bayar front convolutions, a
// down-sampling FCN whose first layer is an 8x8 stride-8 convolution aligned
// with the JPEG block grid, global average pooling and a three-layer MLP.
class QfPredictorImpl : public torch::nn::Module {
 public:
  explicit QfPredictorImpl(const QfPredictorOptions& options = {});

  // Unnormalised class scores [N, 6].
  torch::Tensor forward(const torch::Tensor& x);
  // Softmax probabilities [N, 6].
  torch::Tensor Probabilities(const torch::Tensor& x);

  void ApplyConstraints() { bayar->ApplyConstraint(); }

  torch::nn::Conv2d vanilla{nullptr};
  BayarConv2d bayar{nullptr};
  torch::nn::Sequential fcn{nullptr};
  torch::nn::Sequential head{nullptr};

 private:
  torch::Tensor srm_;
};
TORCH_MODULE(QfPredictor);

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_PREDICTOR_H_
