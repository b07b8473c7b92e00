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

#ifndef IMMUNET_IMAGING_METRICS_H_
#define IMMUNET_IMAGING_METRICS_H_

#include <torch/torch.h>

namespace immunet::imaging {

inline constexpr double kPsnrCap = 99.0;

// PSNR in dB on the 0-255 scale, averaged over nothing: the whole tensor is
// one sample. Identical inputs give kPsnrCap.
double Psnr(const torch::Tensor& a, const torch::Tensor& b);

// PSNR restricted to pixels where `region` (broadcastable [.., 1, H, W]) is 1.
// An empty region gives kPsnrCap.
double PsnrMasked(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& region);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean SSIM over the luminance of single images ([C, H, W] or [1, C, H, W]),
// using a Gaussian window without padding.
double Ssim(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& options = {});

// Pixel-level F1 of binary masks. Both empty -> 1, exactly one empty -> 0.
double F1Score(const torch::Tensor& predicted, const torch::Tensor& truth);

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_METRICS_H_
