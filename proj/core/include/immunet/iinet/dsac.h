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

#ifndef IMMUNET_IINET_DSAC_H_
#define IMMUNET_IINET_DSAC_H_

#include <torch/torch.h>

#include <vector>

#include "immunet/nn/spectral_norm.h"

namespace immunet::iinet {

// Five-layer residual conv block used for the scale and shift functions of
// a coupling layer. Hidden layers are spectral-normalized 3x3 convolutions
// with ELU; the output projection is a plain convolution initialised to zero,
// so a fresh coupling layer is the identity.
class CouplingNetImpl : public torch::nn::Module {
 public:
  CouplingNetImpl(int64_t channels, int64_t width);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d output{nullptr};

 private:
  std::vector<nn::SNConv2d> hidden_;
};
TORCH_MODULE(CouplingNet);

// Double-side affine coupling on a [N, C, h, w] feature map with even C.
// With halves (u1, u2) and e(z) = exp(clamp * tanh(z)):
//   v1 = u1 * e(s2(u2)) + t2(u2)
//   v2 = u2 * e(s1(v1)) + t1(v1)
class DsacLayerImpl : public torch::nn::Module {
 public:
  DsacLayerImpl(int64_t channels, int64_t width, double clamp);

  torch::Tensor forward(const torch::Tensor& u);
  torch::Tensor inverse(const torch::Tensor& v);

  int64_t channels() const { return channels_; }
  double clamp() const { return clamp_; }

  CouplingNet s1{nullptr}, t1{nullptr}, s2{nullptr}, t2{nullptr};

 private:
  torch::Tensor Scale(CouplingNet& net, const torch::Tensor& x);

  int64_t channels_;
  double clamp_;
};
TORCH_MODULE(DsacLayer);

}  // namespace immunet::iinet

#endif  // IMMUNET_IINET_DSAC_H_
