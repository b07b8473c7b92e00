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

#ifndef IMMUNET_ATTACK_SIMULATE_H_
#define IMMUNET_ATTACK_SIMULATE_H_

#include <torch/torch.h>

#include <vector>

#include "immunet/attack/plan.h"
#include "immunet/attack/postprocess.h"
#include "immunet/attack/tamper.h"

namespace immunet::attack {

struct AttackOutcome {
  torch::Tensor immunized;  // quantize_ste(X)
  torch::Tensor tampered;   // X_tmp, before post-processing
  torch::Tensor attacked;   // quantize_ste(IP(X_tmp))
  torch::Tensor mask;       // ground truth, zero outside a crop window
  torch::Tensor valid;      // 1 inside the evaluated area
  CropGeometry crop;
};

// Tamper mask for a plan: zeros for kNone, otherwise the free-form mask.
torch::Tensor PlanMask(const AttackPlan& plan, int64_t height, int64_t width);

// Applies only the tampering stage of `plan` with the given mask.
torch::Tensor ApplyTamper(const torch::Tensor& x, const torch::Tensor& mask, const AttackPlan& plan,
                          const std::vector<torch::Tensor>& donors, const InpaintRegistry& inpaint);

// Full attack on a single image [1, 3, H, W]: mask, tamper, post-process,
// 8-bit quantization. `fixed_mask` (when defined) replaces the generated
// mask, which is how pre-tampered training items reuse their add-on mask.
AttackOutcome SimulateAttack(const torch::Tensor& x, const AttackPlan& plan, const std::vector<torch::Tensor>& donors,
                             JpegSimulator* jpeg, const InpaintRegistry& inpaint,
                             const torch::Tensor& fixed_mask = {});

}  // namespace immunet::attack

#endif  // IMMUNET_ATTACK_SIMULATE_H_
