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

#ifndef IMMUNET_KDJPEG_CODEC_H_
#define IMMUNET_KDJPEG_CODEC_H_

#include <torch/torch.h>

#include "immunet/attack/postprocess.h"
#include "immunet/kdjpeg/qf.h"

namespace immunet::kdjpeg {

// Encode/decode each image of a [N, 3, H, W] batch through a baseline 4:2:0
// JPEG codec at `quality` (1..100). Quality 100 skips the codec: the result
// is just the 8-bit quantized input. Not differentiable.
torch::Tensor RealJpeg(const torch::Tensor& images, int quality);
torch::Tensor RealJpeg(const torch::Tensor& images, QfClass qf);

// Evaluation-time JPEG layer: the real codec with a straight-through
// gradient so it can sit inside a differentiable graph.
class RealJpegSimulator : public attack::JpegSimulator {
 public:
  torch::Tensor Compress(const torch::Tensor& image, int quality) override;
};

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_CODEC_H_
