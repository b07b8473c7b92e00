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

#include "immunet/training/hyperparams.h"

#include "immunet/errors.h"

namespace immunet::training {

std::string ToString(Stage1AlphaMode mode) {
  return mode == Stage1AlphaMode::kProtection ? "protection" : "recovery";
}

Stage1AlphaMode ParseStage1AlphaMode(const std::string& name) {
  if (name == "protection") return Stage1AlphaMode::kProtection;
  if (name == "recovery") return Stage1AlphaMode::kRecovery;
  throw ContractError("unknown stage-1 alpha mode '" + name + "' (expected protection or recovery)");
}

void HyperParams::Validate() const {
  Require(alpha >= 0 && beta >= 0 && gamma >= 0 && omega >= 0 && epsilon >= 0, "loss weights must be non-negative");
  Require(lr > 0 && lr_floor >= 0 && lr_floor <= lr, "need 0 <= lr_floor <= lr and lr > 0");
  Require(batch_size >= 1, "batch size must be at least 1");
  Require(r_aug >= 0 && r_aug <= 1, "r_aug must lie in [0, 1]");
  Require(!attacks.empty(), "attack list is empty");
  Require(switch_window >= 1, "switch window must be positive");
}

TermWeights StageWeights(const HyperParams& hp, int stage) {
  TermWeights w{1.0, hp.alpha};
  if (stage == 1) {
    if (hp.stage1_alpha_mode == Stage1AlphaMode::kProtection) {
      w.prt = 0.0;
    } else {
      // In this reading alpha sits on L_rec and L_prt carries unit weight.
      w.rec = 0.0;
      w.prt = 1.0;
    }
  } else if (hp.stage1_alpha_mode == Stage1AlphaMode::kRecovery) {
    w.rec = hp.alpha;
    w.prt = 1.0;
  }
  return w;
}

}  // namespace immunet::training
