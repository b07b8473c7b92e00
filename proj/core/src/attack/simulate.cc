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

#include "immunet/attack/simulate.h"

#include "immunet/attack/mask.h"
#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::attack {

torch::Tensor PlanMask(const AttackPlan& plan, int64_t height, int64_t width) {
  if (plan.tamper == TamperKind::kNone) return torch::zeros({1, 1, height, width});
  return GenerateFreeformMask(height, width, plan.mask, plan.seed);
}

torch::Tensor ApplyTamper(const torch::Tensor& x, const torch::Tensor& mask, const AttackPlan& plan,
                          const std::vector<torch::Tensor>& donors, const InpaintRegistry& inpaint) {
  switch (plan.tamper) {
    case TamperKind::kNone:
      return x;
    case TamperKind::kCopyMove:
      return TamperCopyMove(x, mask, plan.shift_dy, plan.shift_dx);
    case TamperKind::kSplicing: {
      Require(!donors.empty(), "splicing needs at least one donor image");
      const auto& donor = donors[static_cast<size_t>(plan.donor_index) % donors.size()];
      return TamperSplice(x, mask, imaging::AsBatch(donor).to(x.options()));
    }
    case TamperKind::kInpainting:
      return TamperInpaint(x, mask, inpaint, plan.inpaint_provider);
  }
  throw ContractError("ApplyTamper: unknown tamper kind");
}

AttackOutcome SimulateAttack(const torch::Tensor& x, const AttackPlan& plan, const std::vector<torch::Tensor>& donors,
                             JpegSimulator* jpeg, const InpaintRegistry& inpaint, const torch::Tensor& fixed_mask) {
  auto image = imaging::AsBatch(x);
  imaging::CheckChannels(image, 3, "SimulateAttack");
  ValidatePlan(plan);
  const int64_t h = image.size(2), w = image.size(3);

  AttackOutcome out;
  torch::Tensor mask;
  if (plan.tamper == TamperKind::kNone) {
    mask = torch::zeros({1, 1, h, w}, image.options().requires_grad(false));
  } else if (fixed_mask.defined()) {
    mask = imaging::AsBatch(fixed_mask).to(image.options().requires_grad(false));
  } else {
    mask = PlanMask(plan, h, w).to(image.options().requires_grad(false));
  }
  out.immunized = imaging::QuantizeSte(image);
  out.tampered = ApplyTamper(out.immunized, mask, plan, donors, inpaint);
  auto post = Postprocess(out.tampered, plan.post, plan.post_params, jpeg);
  out.attacked = imaging::QuantizeSte(post.image);
  out.crop = post.crop;
  out.valid = CropValidity(mask, post.crop);
  out.mask = mask * out.valid;
  return out;
}

}  // namespace immunet::attack
