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

#ifndef IMMUNET_TRAINING_HYPERPARAMS_H_
#define IMMUNET_TRAINING_HYPERPARAMS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "immunet/attack/plan.h"

namespace immunet::training {

// Which term the stage-1 "alpha = 0" switches off.
enum class Stage1AlphaMode {
  kProtection,  // alpha multiplies L_prt and is zeroed in stage 1
  kRecovery,    // alpha multiplies L_rec and is zeroed in stage 1
};

std::string ToString(Stage1AlphaMode mode);
Stage1AlphaMode ParseStage1AlphaMode(const std::string& name);

struct HyperParams {
  double alpha = 3.0;
  double beta = 1e-3;
  double gamma = 10.0;
  double omega = 0.01;
  double epsilon = 0.1;
  double lr = 1e-4;
  double lr_floor = 1e-6;
  int64_t batch_size = 4;
  double r_aug = 0.15;
  std::vector<attack::PostKind> attacks = attack::DefaultTrainingAttacks();
  Stage1AlphaMode stage1_alpha_mode = Stage1AlphaMode::kProtection;
  // Stage 1 counts as converged once the running mean of L_loc over the
  // last `switch_window` steps drops below `switch_threshold`.
  double switch_threshold = 0.1;
  int64_t switch_window = 200;

  // Throws ContractError on negative weights, n < 1 or r_aug outside [0, 1].
  void Validate() const;
};

// Weights actually applied to (rec, prt) in the given stage.
struct TermWeights {
  double rec = 1.0;
  double prt = 0.0;
};
TermWeights StageWeights(const HyperParams& hp, int stage);

}  // namespace immunet::training

#endif  // IMMUNET_TRAINING_HYPERPARAMS_H_
