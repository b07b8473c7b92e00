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

#ifndef IMMUNET_TESTS_TEST_UTIL_H_
#define IMMUNET_TESTS_TEST_UTIL_H_

#include <torch/torch.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>

#include "immunet/imaging/quantize.h"
#include "immunet/nn/spectral_norm.h"

namespace immunet::testing {

inline torch::Generator Gen(uint64_t seed) { return torch::make_generator<at::CPUGeneratorImpl>(seed); }

// Uniform pixels on the 8-bit grid.
inline torch::Tensor RandomImage(uint64_t seed, int64_t n = 1, int64_t c = 3, int64_t h = 64, int64_t w = 64) {
  return imaging::Quantize8Bit(torch::rand({n, c, h, w}, Gen(seed)));
}

inline torch::Tensor RandomMask(uint64_t seed, int64_t h = 64, int64_t w = 64, double p = 0.3) {
  return (torch::rand({1, 1, h, w}, Gen(seed)) < p).to(torch::kFloat);
}

inline bool BitwiseEqual(const torch::Tensor& a, const torch::Tensor& b) {
  return a.sizes() == b.sizes() && a.dtype() == b.dtype() && torch::equal(a, b);
}

// Overwrites every parameter with N(0, std^2) noise so zero-initialised
// projections stop hiding the coupling functions.
inline void RandomizeParameters(torch::nn::Module& module, uint64_t seed, double std = 0.05) {
  torch::NoGradGuard no_grad;
  auto gen = Gen(seed);
  for (auto& p : module.parameters()) p.copy_(torch::randn(p.sizes(), gen, p.options()) * std);
  nn::RefreshSpectralNorm(module);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("immunet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Reference square-window min/max filter with zero borders; window offsets
// [-k/2, k-1-k/2] around each pixel.
inline torch::Tensor BruteForceFilter(const torch::Tensor& mask, int64_t k, bool take_max) {
  auto m = mask.reshape({mask.size(-2), mask.size(-1)}).contiguous();
  const int64_t h = m.size(0), w = m.size(1);
  auto out = torch::zeros_like(m);
  auto src = m.accessor<float, 2>();
  auto dst = out.accessor<float, 2>();
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      float acc = take_max ? 0.0f : 1.0f;
      for (int64_t dy = -k / 2; dy <= k - 1 - k / 2; ++dy) {
        for (int64_t dx = -k / 2; dx <= k - 1 - k / 2; ++dx) {
          const int64_t yy = y + dy, xx = x + dx;
          const float v = (yy >= 0 && yy < h && xx >= 0 && xx < w) ? src[yy][xx] : 0.0f;
          acc = take_max ? std::max(acc, v) : std::min(acc, v);
        }
      }
      dst[y][x] = acc;
    }
  }
  return out.reshape(mask.sizes());
}

}  // namespace immunet::testing

#endif  // IMMUNET_TESTS_TEST_UTIL_H_
