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

#include "immunet/imaging/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "immunet/errors.h"
#include "immunet/imaging/canny.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::imaging {

namespace {

double PsnrFromMse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 20.0 * std::log10(255.0 / std::sqrt(mse)));
}

torch::Tensor GrayPlane(const torch::Tensor& image) {
  auto x = AsBatch(image).detach().to(torch::kDouble);
  Require(x.size(0) == 1, "Ssim: expects a single image");
  if (x.size(1) == 3) x = Luminance(x);
  Require(x.size(1) == 1, "Ssim: expects 1 or 3 channels");
  return x[0][0].contiguous() * 255.0;
}

// 'valid' separable Gaussian filtering of a 2-D plane.
torch::Tensor FilterValid(const torch::Tensor& plane, const torch::Tensor& kernel) {
  auto x = plane.unsqueeze(0).unsqueeze(0);
  const int64_t k = kernel.size(0);
  auto kh = kernel.view({1, 1, 1, k});
  auto kv = kernel.view({1, 1, k, 1});
  return torch::conv2d(torch::conv2d(x, kh), kv)[0][0];
}

}  // namespace

double Psnr(const torch::Tensor& a, const torch::Tensor& b) {
  CheckSameShape(a, b, "Psnr");
  auto diff = (a.detach().to(torch::kDouble) - b.detach().to(torch::kDouble)) * 255.0;
  return PsnrFromMse(diff.pow(2).mean().item<double>());
}

double PsnrMasked(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& region) {
  CheckSameShape(a, b, "PsnrMasked");
  auto r = region.detach().to(torch::kDouble).expand_as(a);
  const double count = r.sum().item<double>();
  if (count <= 0.0) return kPsnrCap;
  auto diff = (a.detach().to(torch::kDouble) - b.detach().to(torch::kDouble)) * 255.0;
  return PsnrFromMse((diff.pow(2) * r).sum().item<double>() / count);
}

double Ssim(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& options) {
  CheckSameShape(AsBatch(a), AsBatch(b), "Ssim");
  auto x = GrayPlane(a);
  auto y = GrayPlane(b);
  Require(x.size(0) >= options.window && x.size(1) >= options.window,
          "Ssim: image smaller than the " + std::to_string(options.window) + "px window");

  std::vector<double> taps(options.window);
  double sum = 0.0;
  const int radius = options.window / 2;
  for (int i = 0; i < options.window; ++i) {
    const double d = i - radius;
    taps[i] = std::exp(-d * d / (2.0 * options.sigma * options.sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  auto kernel = torch::tensor(taps, torch::kDouble);

  const double c1 = std::pow(options.k1 * 255.0, 2);
  const double c2 = std::pow(options.k2 * 255.0, 2);
  auto mu_x = FilterValid(x, kernel);
  auto mu_y = FilterValid(y, kernel);
  auto sxx = FilterValid(x * x, kernel) - mu_x * mu_x;
  auto syy = FilterValid(y * y, kernel) - mu_y * mu_y;
  auto sxy = FilterValid(x * y, kernel) - mu_x * mu_y;
  auto map = ((2 * mu_x * mu_y + c1) * (2 * sxy + c2)) /
             ((mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2));
  return map.mean().item<double>();
}

double F1Score(const torch::Tensor& predicted, const torch::Tensor& truth) {
  CheckSameShape(predicted, truth, "F1Score");
  Require(IsBinary(predicted) && IsBinary(truth), "F1Score: masks must be binary");
  auto p = predicted.detach().to(torch::kDouble);
  auto t = truth.detach().to(torch::kDouble);
  const double tp = (p * t).sum().item<double>();
  const double pred_pos = p.sum().item<double>();
  const double true_pos = t.sum().item<double>();
  if (pred_pos == 0.0 && true_pos == 0.0) return 1.0;
  if (pred_pos == 0.0 || true_pos == 0.0) return 0.0;
  return 2.0 * tp / (pred_pos + true_pos);
}

}  // namespace immunet::imaging
