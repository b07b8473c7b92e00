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

#include "immunet/attack/postprocess.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"
#include "immunet/random.h"
#include "immunet/random_fields.h"

namespace immunet::attack {

namespace F = torch::nn::functional;
using torch::indexing::Slice;

namespace {

torch::Tensor GaussianTaps(double sigma, const torch::TensorOptions& options) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return torch::tensor(taps, torch::kDouble).to(options.dtype());
}

}  // namespace

torch::Tensor GaussianBlur(const torch::Tensor& x, double sigma) {
  imaging::CheckBatch(x, "GaussianBlur");
  const int64_t c = x.size(1);
  auto taps = GaussianTaps(sigma, x.options());
  const int64_t k = taps.size(0), r = k / 2;
  RequireShape(x.size(2) > r && x.size(3) > r, "GaussianBlur: image smaller than the kernel radius");
  auto kh = taps.view({1, 1, 1, k}).expand({c, 1, 1, k}).contiguous();
  auto kv = taps.view({1, 1, k, 1}).expand({c, 1, k, 1}).contiguous();
  auto y = F::pad(x, F::PadFuncOptions({r, r, 0, 0}).mode(torch::kReflect));
  y = F::conv2d(y, kh, F::Conv2dFuncOptions().groups(c));
  y = F::pad(y, F::PadFuncOptions({0, 0, r, r}).mode(torch::kReflect));
  return F::conv2d(y, kv, F::Conv2dFuncOptions().groups(c));
}

torch::Tensor MedianBlur(const torch::Tensor& x, int kernel) {
  imaging::CheckBatch(x, "MedianBlur");
  Require(kernel >= 1 && kernel % 2 == 1, "MedianBlur: kernel must be odd");
  if (kernel == 1) return x;
  const int64_t r = kernel / 2;
  torch::Tensor median;
  {
    torch::NoGradGuard no_grad;
    auto padded = F::pad(x.detach(), F::PadFuncOptions({r, r, r, r}).mode(torch::kReflect));
    auto patches = padded.unfold(2, kernel, 1).unfold(3, kernel, 1);  // [N, C, H, W, k, k]
    median = std::get<0>(patches.reshape({x.size(0), x.size(1), x.size(2), x.size(3), -1}).median(-1));
  }
  return imaging::StraightThrough(x, median);
}

torch::Tensor RescaleRoundTrip(const torch::Tensor& x, double factor) {
  imaging::CheckBatch(x, "RescaleRoundTrip");
  if (factor == 1.0) return x;
  const int64_t h = x.size(2), w = x.size(3);
  const int64_t sh = std::max<int64_t>(1, std::llround(h * factor));
  const int64_t sw = std::max<int64_t>(1, std::llround(w * factor));
  auto scaled = F::interpolate(x, F::InterpolateFuncOptions()
                                      .size(std::vector<int64_t>{sh, sw})
                                      .mode(torch::kBilinear)
                                      .align_corners(false)
                                      .antialias(factor < 1.0));
  return F::interpolate(scaled, F::InterpolateFuncOptions()
                                    .size(std::vector<int64_t>{h, w})
                                    .mode(torch::kBilinear)
                                    .align_corners(false)
                                    .antialias(factor > 1.0));
}

torch::Tensor AddGaussianNoise(const torch::Tensor& x, double sigma, uint64_t seed) {
  imaging::CheckBatch(x, "AddGaussianNoise");
  if (sigma == 0.0) return x;
  return x + sigma * NormalField(x.sizes(), seed).to(x.options());
}

torch::Tensor PixelDropout(const torch::Tensor& x, double rate, uint64_t seed) {
  imaging::CheckBatch(x, "PixelDropout");
  if (rate == 0.0) return x;
  auto keep = (UniformField({x.size(0), 1, x.size(2), x.size(3)}, seed) >= rate).to(x.options());
  return x * keep;
}

CropGeometry SampleCropWindow(int64_t height, int64_t width, double area, uint64_t seed) {
  Require(area >= 0.5 && area <= 1.0, "SampleCropWindow: retained area must lie in [0.5, 1]");
  CropGeometry g;
  if (area >= 1.0) {
    g.height = height;
    g.width = width;
    return g;
  }
  Rng rng(seed);
  const double side = std::sqrt(area);
  auto align = [](int64_t v, int64_t limit) {
    // Round up to a multiple of 8 so the cropped plane stays Haar-friendly
    // and never drops below the requested area.
    return std::min(limit, ((v + 7) / 8) * 8);
  };
  g.active = true;
  g.height = align(static_cast<int64_t>(std::ceil(height * side)), height);
  g.width = align(static_cast<int64_t>(std::ceil(width * side)), width);
  g.top = ((height - g.height) > 0) ? rng.UniformInt(0, (height - g.height) / 8) * 8 : 0;
  g.left = ((width - g.width) > 0) ? rng.UniformInt(0, (width - g.width) / 8) * 8 : 0;
  return g;
}

torch::Tensor CropValidity(const torch::Tensor& like, const CropGeometry& crop) {
  auto valid = torch::ones({like.size(0), 1, like.size(2), like.size(3)}, like.options().requires_grad(false));
  if (!crop.active) return valid;
  valid.zero_();
  valid.index_put_({Slice(), Slice(), Slice(crop.top, crop.top + crop.height), Slice(crop.left, crop.left + crop.width)},
                   1.0);
  return valid;
}

torch::Tensor ZeroOutsideCrop(const torch::Tensor& x, const CropGeometry& crop) {
  if (!crop.active) return x;
  return x * CropValidity(x, crop);
}

torch::Tensor ExtractCrop(const torch::Tensor& x, const CropGeometry& crop) {
  if (!crop.active) return x;
  return x.index({Slice(), Slice(), Slice(crop.top, crop.top + crop.height), Slice(crop.left, crop.left + crop.width)});
}

PostResult Postprocess(const torch::Tensor& x, PostKind kind, const PostParams& params, JpegSimulator* jpeg) {
  imaging::CheckBatch(x, "Postprocess");
  AttackPlan probe;
  probe.post = kind;
  probe.post_params = params;
  ValidatePlan(probe);
  PostResult result;
  switch (kind) {
    case PostKind::kIdentity:
      result.image = x;
      break;
    case PostKind::kAwgn:
      result.image = AddGaussianNoise(x, params.awgn_sigma, params.seed);
      break;
    case PostKind::kGaussianBlur:
      result.image = GaussianBlur(x, params.blur_sigma);
      break;
    case PostKind::kMedianBlur:
      result.image = MedianBlur(x, params.median_kernel);
      break;
    case PostKind::kRescale:
      result.image = RescaleRoundTrip(x, params.rescale_factor);
      break;
    case PostKind::kJpeg:
      Require(jpeg != nullptr, "Postprocess: jpeg attack needs a JPEG simulator");
      result.image = jpeg->Compress(x, params.jpeg_quality);
      break;
    case PostKind::kCrop:
      result.crop = SampleCropWindow(x.size(2), x.size(3), params.crop_area, params.seed);
      result.image = ZeroOutsideCrop(x, result.crop);
      break;
    case PostKind::kDropout:
      result.image = PixelDropout(x, params.dropout_rate, params.seed);
      break;
    default:
      throw ContractError("Postprocess: unknown post-processing kind");
  }
  return result;
}

}  // namespace immunet::attack
