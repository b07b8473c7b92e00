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

#include "immunet/imaging/canny.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::imaging {

namespace {

std::vector<double> GaussianKernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable convolution with replicated borders.
std::vector<double> Blur(const std::vector<double>& src, int h, int w, const std::vector<double>& k) {
  const int radius = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += k[i + radius] * src[y * w + xx];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += k[i + radius] * tmp[yy * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

std::vector<float> CannySingle(const std::vector<double>& luma, int h, int w, const CannyOptions& opt) {
  const auto smooth = Blur(luma, h, w, GaussianKernel(opt.sigma));
  auto at = [&](int y, int x) { return smooth[std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1)]; };

  std::vector<double> mag(static_cast<size_t>(h) * w), gx(mag.size()), gy(mag.size());
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1));
      const double dy = (at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1));
      const size_t i = static_cast<size_t>(y) * w + x;
      gx[i] = dx;
      gy[i] = dy;
      mag[i] = std::hypot(dx, dy);
      max_mag = std::max(max_mag, mag[i]);
    }
  }
  std::vector<float> edges(mag.size(), 0.0f);
  // Flat images have no edges; a tiny floor keeps float noise from counting.
  if (max_mag < 1e-9) return edges;
  const double low = opt.low_ratio * max_mag;
  const double high = opt.high_ratio * max_mag;

  // Non-maximum suppression along the quantized gradient direction.
  auto magnitude = [&](int y, int x) {
    if (y < 0 || y >= h || x < 0 || x >= w) return 0.0;
    return mag[static_cast<size_t>(y) * w + x];
  };
  std::vector<uint8_t> state(mag.size(), 0);  // 0 none, 1 weak, 2 strong
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double m = mag[i];
      if (m < low) continue;
      double angle = std::atan2(gy[i], gx[i]) * 180.0 / M_PI;
      if (angle < 0) angle += 180.0;
      double n1, n2;
      if (angle < 22.5 || angle >= 157.5) {
        n1 = magnitude(y, x - 1);
        n2 = magnitude(y, x + 1);
      } else if (angle < 67.5) {
        n1 = magnitude(y - 1, x - 1);
        n2 = magnitude(y + 1, x + 1);
      } else if (angle < 112.5) {
        n1 = magnitude(y - 1, x);
        n2 = magnitude(y + 1, x);
      } else {
        n1 = magnitude(y - 1, x + 1);
        n2 = magnitude(y + 1, x - 1);
      }
      // Ties broken toward the first neighbour so plateaus keep one pixel.
      if (m > n1 && m >= n2) state[i] = m >= high ? 2 : 1;
    }
  }

  // Hysteresis: weak pixels survive when 8-connected to a strong one.
  std::vector<size_t> stack;
  for (size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 2) {
      edges[i] = 1.0f;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const size_t i = stack.back();
    stack.pop_back();
    const int y = static_cast<int>(i / w), x = static_cast<int>(i % w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int yy = y + dy, xx = x + dx;
        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
        const size_t j = static_cast<size_t>(yy) * w + xx;
        if (state[j] == 1 && edges[j] == 0.0f) {
          edges[j] = 1.0f;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace

torch::Tensor Luminance(const torch::Tensor& image) {
  auto x = AsBatch(image);
  CheckChannels(x, 3, "Luminance");
  return (0.299 * x.select(1, 0) + 0.587 * x.select(1, 1) + 0.114 * x.select(1, 2)).unsqueeze(1);
}

torch::Tensor CannyEdge(const torch::Tensor& image, const CannyOptions& options) {
  auto x = AsBatch(image);
  CheckBatch(x, "CannyEdge");
  Require(x.size(1) == 3, "CannyEdge: expected a 3-channel image, got " + std::to_string(x.size(1)));
  torch::NoGradGuard no_grad;
  auto luma = Luminance(x.detach()).to(torch::kDouble).contiguous();
  const int64_t n = x.size(0);
  const int h = static_cast<int>(x.size(2)), w = static_cast<int>(x.size(3));
  auto out = torch::zeros({n, 1, h, w}, torch::kFloat);
  for (int64_t b = 0; b < n; ++b) {
    const double* src = luma[b][0].data_ptr<double>();
    std::vector<double> plane(src, src + static_cast<size_t>(h) * w);
    const auto edges = CannySingle(plane, h, w, options);
    std::copy(edges.begin(), edges.end(), out[b][0].data_ptr<float>());
  }
  return out.to(x.dtype());
}

}  // namespace immunet::imaging
