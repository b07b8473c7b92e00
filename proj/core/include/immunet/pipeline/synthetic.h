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

#ifndef IMMUNET_PIPELINE_SYNTHETIC_H_
#define IMMUNET_PIPELINE_SYNTHETIC_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace immunet::pipeline {

// Procedural natural-ish image [3, size, size] on the 8-bit grid: a colour
// gradient overlaid with antialiased discs, boxes, ellipses and striped
// patches, plus sensor-like grain. Deterministic in `seed`.
torch::Tensor SyntheticImage(int64_t size, uint64_t seed);

std::vector<torch::Tensor> SyntheticCorpus(int64_t count, int64_t size, uint64_t seed);

// Writes `count` PNGs named synth_0000.png ... into `dir`.
void WriteSyntheticCorpus(const std::filesystem::path& dir, int64_t count, int64_t size, uint64_t seed);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_SYNTHETIC_H_
