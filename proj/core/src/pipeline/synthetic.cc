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

#include "immunet/pipeline/synthetic.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "immunet/errors.h"
#include "immunet/imaging/image_io.h"
#include "immunet/imaging/quantize.h"
#include "immunet/random.h"
#include "immunet/random_fields.h"

namespace immunet::pipeline {

namespace {

torch::Tensor RandomColor(Rng& rng) {
  return torch::tensor({rng.Uniform(), rng.Uniform(), rng.Uniform()}, torch::kFloat).view({3, 1, 1});
}

}  // namespace

torch::Tensor SyntheticImage(int64_t size, uint64_t seed) {
  Require(size > 0, "SyntheticImage: size must be positive");
  Rng rng(seed);
  auto axis = (torch::arange(size, torch::kFloat) + 0.5) / static_cast<double>(size);
  auto yy = axis.view({1, size, 1}).expand({1, size, size});
  auto xx = axis.view({1, 1, size}).expand({1, size, size});
  const double edge = static_cast<double>(size) / 1.5;  // antialiasing sharpness

  const double theta = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  auto ramp = (xx * std::cos(theta) + yy * std::sin(theta) + 1.5) / 3.0;
  auto c0 = RandomColor(rng), c1 = RandomColor(rng);
  auto img = c0 + (c1 - c0) * ramp;

  const int64_t shapes = rng.UniformInt(4, 9);
  for (int64_t k = 0; k < shapes; ++k) {
    const double cy = rng.Uniform(), cx = rng.Uniform();
    const double r = rng.Uniform(0.06, 0.3);
    auto dy = yy - cy, dx = xx - cx;
    torch::Tensor dist;  // signed, negative inside
    switch (rng.UniformInt(0, 3)) {
      case 0:
        dist = (dy * dy + dx * dx).sqrt() - r;
        break;
      case 1:
        dist = torch::max(dy.abs() - r * rng.Uniform(0.5, 1.5), dx.abs() - r * rng.Uniform(0.5, 1.5));
        break;
      case 2: {
        const double phi = rng.Uniform(0.0, std::numbers::pi);
        auto u = dx * std::cos(phi) + dy * std::sin(phi);
        auto v = -dx * std::sin(phi) + dy * std::cos(phi);
        const double a = r, b = r * rng.Uniform(0.3, 0.9);
        dist = ((u / a).square() + (v / b).square()).sqrt() * b - b;
        break;
      }
      default:
        dist = torch::max(dy.abs(), dx.abs()) - r;
        break;
    }
    auto cover = torch::sigmoid(-dist * edge);
    auto fill = RandomColor(rng).expand({3, size, size});
    if (rng.Bernoulli(0.5)) {
      const double freq = rng.Uniform(3.0, 0.25 * static_cast<double>(size));
      const double psi = rng.Uniform(0.0, std::numbers::pi);
      auto wave = torch::sin(2.0 * std::numbers::pi * freq * (xx * std::cos(psi) + yy * std::sin(psi)));
      fill = fill * (0.75 + 0.25 * wave) + 0.1 * (RandomColor(rng) - 0.5) * wave;
    }
    img = img * (1.0 - cover) + fill * cover;
  }
  const double grain = rng.Uniform(0.005, 0.03);
  img = img + grain * NormalField({3, size, size}, rng.NextU64());
  return imaging::Quantize8Bit(img);
}

std::vector<torch::Tensor> SyntheticCorpus(int64_t count, int64_t size, uint64_t seed) {
  std::vector<torch::Tensor> out;
  Rng rng(seed);
  for (int64_t i = 0; i < count; ++i) out.push_back(SyntheticImage(size, rng.NextU64()));
  return out;
}

void WriteSyntheticCorpus(const std::filesystem::path& dir, int64_t count, int64_t size, uint64_t seed) {
  std::filesystem::create_directories(dir);
  const auto images = SyntheticCorpus(count, size, seed);
  for (size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%04zu.png", i);
    imaging::WriteImage(dir / name, images[i]);
  }
}

}  // namespace immunet::pipeline
