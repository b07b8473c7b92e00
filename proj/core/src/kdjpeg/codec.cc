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

#include "immunet/kdjpeg/codec.h"

#include "immunet/errors.h"
#include "immunet/imaging/image_io.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::kdjpeg {

torch::Tensor RealJpeg(const torch::Tensor& images, int quality) {
  auto x = imaging::AsBatch(images).detach();
  imaging::CheckChannels(x, 3, "RealJpeg");
  Require(quality >= 1 && quality <= 100, "RealJpeg: quality must lie in [1, 100]");
  if (quality == 100) return imaging::Quantize8Bit(x);
  std::vector<torch::Tensor> out;
  out.reserve(static_cast<size_t>(x.size(0)));
  for (int64_t i = 0; i < x.size(0); ++i) {
    out.push_back(imaging::DecodeJpeg(imaging::EncodeJpeg(x[i].cpu(), quality)));
  }
  return torch::stack(out).to(x.options());
}

torch::Tensor RealJpeg(const torch::Tensor& images, QfClass qf) { return RealJpeg(images, qf.quality()); }

torch::Tensor RealJpegSimulator::Compress(const torch::Tensor& image, int quality) {
  return imaging::StraightThrough(image, RealJpeg(image, quality));
}

}  // namespace immunet::kdjpeg
