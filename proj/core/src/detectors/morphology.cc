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

#include "immunet/detectors/morphology.h"

#include <algorithm>
#include <cmath>

#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::detectors {

namespace F = torch::nn::functional;

namespace {

torch::Tensor AsMaskBatch(const torch::Tensor& m, const char* what) {
  auto b = imaging::AsBatch(m);
  imaging::CheckChannels(b, 1, what);
  return b;
}

// Separable max filter over the anchored k x k window, padding with `border`.
torch::Tensor MaxFilter(const torch::Tensor& x, int64_t k, double border) {
  if (k == 1) return x.clone();
  const int64_t before = k / 2, after = k - 1 - k / 2;
  auto rows = F::max_pool2d(F::pad(x, F::PadFuncOptions({0, 0, before, after}).value(border)),
                            F::MaxPool2dFuncOptions({k, 1}).stride(1));
  return F::max_pool2d(F::pad(rows, F::PadFuncOptions({before, after, 0, 0}).value(border)),
                       F::MaxPool2dFuncOptions({1, k}).stride(1));
}

}  // namespace

MaskPostprocessParams MaskPostprocessParams::ForResolution(int64_t resolution) {
  Require(resolution > 0, "MaskPostprocessParams: resolution must be positive");
  MaskPostprocessParams p;
  const double s = static_cast<double>(resolution) / kReferenceResolution;
  p.erosion = std::max<int64_t>(1, std::llround(8 * s));
  p.dilation = std::max<int64_t>(1, std::llround(16 * s));
  return p;
}

void MaskPostprocessParams::Validate() const {
  Require(threshold > 0.0 && threshold < 1.0, "mask threshold must lie in (0, 1)");
  Require(erosion > 0 && dilation > 0, "morphology kernels must be positive");
}

torch::Tensor Binarize(const torch::Tensor& soft, double threshold) {
  return (soft > threshold).to(soft.scalar_type());
}

torch::Tensor Erode(const torch::Tensor& binary, int64_t kernel) {
  Require(kernel > 0, "Erode: kernel must be positive");
  torch::NoGradGuard no_grad;
  auto b = AsMaskBatch(binary, "Erode");
  // min over the window with zero borders == 1 - max of the complement
  // padded with ones.
  return 1.0 - MaxFilter(1.0 - b, kernel, 1.0);
}

torch::Tensor Dilate(const torch::Tensor& binary, int64_t kernel) {
  Require(kernel > 0, "Dilate: kernel must be positive");
  torch::NoGradGuard no_grad;
  return MaxFilter(AsMaskBatch(binary, "Dilate"), kernel, 0.0);
}

torch::Tensor PostprocessMask(const torch::Tensor& soft, const MaskPostprocessParams& params) {
  params.Validate();
  torch::NoGradGuard no_grad;
  auto b = Binarize(AsMaskBatch(soft, "PostprocessMask"), params.threshold);
  return Dilate(Erode(b, params.erosion), params.dilation);
}

torch::Tensor PostprocessMaskSte(const torch::Tensor& soft, const MaskPostprocessParams& params) {
  auto s = AsMaskBatch(soft, "PostprocessMaskSte");
  return imaging::StraightThrough(s, PostprocessMask(s.detach(), params));
}

torch::Tensor Rectify(const torch::Tensor& attacked, const torch::Tensor& mask) {
  auto x = imaging::AsBatch(attacked);
  auto m = AsMaskBatch(mask, "Rectify");
  if (m.size(0) != x.size(0) || m.size(2) != x.size(2) || m.size(3) != x.size(3))
    throw ShapeError("Rectify: mask does not match the image");
  return x * (1.0 - m);
}

}  // namespace immunet::detectors
