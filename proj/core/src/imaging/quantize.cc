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

#include "immunet/imaging/quantize.h"

namespace immunet::imaging {

namespace {

class StraightThroughFn : public torch::autograd::Function<StraightThroughFn> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* /*ctx*/, const torch::Tensor& input,
                               const torch::Tensor& value) {
    (void)input;
    return value.clone();
  }

  static torch::autograd::tensor_list backward(torch::autograd::AutogradContext* /*ctx*/,
                                               torch::autograd::tensor_list grads) {
    return {grads[0], torch::Tensor()};
  }
};

}  // namespace

torch::Tensor StraightThrough(const torch::Tensor& input, const torch::Tensor& value) {
  return StraightThroughFn::apply(input, value.detach());
}

torch::Tensor Quantize8Bit(const torch::Tensor& x) {
  torch::NoGradGuard no_grad;
  // Values are non-negative after the clamp, so floor(v + 0.5) rounds
  // ties away from zero.
  return torch::floor(x.detach().clamp(0.0, 1.0) * 255.0 + 0.5) / 255.0;
}

torch::Tensor QuantizeSte(const torch::Tensor& x) {
  return StraightThrough(x, Quantize8Bit(x));
}

}  // namespace immunet::imaging
