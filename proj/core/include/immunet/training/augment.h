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

#ifndef IMMUNET_TRAINING_AUGMENT_H_
#define IMMUNET_TRAINING_AUGMENT_H_

#include <torch/torch.h>

#include <vector>

#include "immunet/attack/plan.h"
#include "immunet/attack/postprocess.h"
#include "immunet/random.h"

namespace immunet::training {

struct PretamperResult {
  torch::Tensor images;                   // [n, 3, H, W]
  std::vector<torch::Tensor> fixed_masks;  // [1, 1, H, W] per item; undefined when not augmented
};

// Each item is, with probability r_aug, spliced with a donor under a fresh
// free-form mask (rate drawn from [min_rate, max_rate] of `sampling`) before
// immunization. The mask is returned so the attack can reuse it.
PretamperResult PretamperAugment(const torch::Tensor& batch, const std::vector<torch::Tensor>& donors, double r_aug,
                                 Rng& rng, const attack::MaskSpec& mask = {},
                                 const attack::PlanSampling& sampling = {});

struct ExpandedBatch {
  torch::Tensor images;  // [A n, 3, H, W], attack-major
  torch::Tensor mask;    // [A n, 1, H, W], tamper mask zeroed outside crops
  torch::Tensor valid;   // [A n, 1, H, W]
  std::vector<attack::CropGeometry> crops;
};

// Parameters for every (attack j, item i) pair, indexed [j][i].
std::vector<std::vector<attack::PostParams>> SampleExpansionParams(const std::vector<attack::PostKind>& kinds,
                                                                   int64_t n, Rng& rng);

// Applies every post-processing kind to every tampered item. Item
// (j * n + i) is exactly Postprocess(tampered[i], kinds[j], params[j][i]).
// `mask` ([n, 1, H, W]) may be undefined, meaning untampered.
ExpandedBatch ExpandBatchAsymmetric(const torch::Tensor& tampered, const torch::Tensor& mask,
                                    const std::vector<attack::PostKind>& kinds,
                                    const std::vector<std::vector<attack::PostParams>>& params,
                                    attack::JpegSimulator* jpeg);

// Cosine annealing from `base` at step 0 to `floor` at step `last`.
double CosineLr(int64_t step, int64_t last, double base, double floor);

}  // namespace immunet::training

#endif  // IMMUNET_TRAINING_AUGMENT_H_
