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

#ifndef IMMUNET_TRAINING_LOSSES_H_
#define IMMUNET_TRAINING_LOSSES_H_

#include <torch/torch.h>

#include <map>
#include <string>
#include <vector>

#include "immunet/training/hyperparams.h"

namespace immunet::training {

inline constexpr double kLogFloor = 1e-6;

// log(clamp(p, 1e-6, 1 - 1e-6)).
torch::Tensor ClampedLog(const torch::Tensor& p);

// Mean binary cross-entropy of probabilities against {0, 1} targets over the
// pixels where `weight` is 1 (all pixels when undefined).
torch::Tensor Bce(const torch::Tensor& probabilities, const torch::Tensor& target, const torch::Tensor& weight = {});

// Mean |a - b| over the pixels where `weight` is 1; the weight broadcasts
// over channels.
torch::Tensor MaskedL1(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& weight = {});

// Identity forward; multiplies the incoming gradient by `scale`.
torch::Tensor ScaleGradient(const torch::Tensor& x, double scale);

// Everything the main-pipeline losses look at. Image-side tensors (I, E, X,
// Y) hold n items; recovery-side tensors hold A * n items in attack-major
// order, so item j * n + i is image i under attack j.
struct LossInputs {
  torch::Tensor original;     // I   [n, 3, H, W]
  torch::Tensor edges;        // E   [n, 1, H, W]
  torch::Tensor immunized;    // X   [n, 3, H, W]
  torch::Tensor null_channel; // Y   [n, 1, H, W]
  torch::Tensor recovered;    // I^  [A n, 3, H, W]
  torch::Tensor recovered_edges;  // E^ [A n, 1, H, W]
  torch::Tensor mask;         // M   [A n, 1, H, W]
  torch::Tensor soft_mask;    // M^  [A n, 1, H, W]
  torch::Tensor valid;        // optional [A n, 1, H, W]; restricts L_rec and L_loc
  torch::Tensor d_a_fake;     // D_A(X)
  torch::Tensor d_b_fake;     // D_B(I^)
  std::vector<std::string> attack_names;  // A labels for the breakdown
};

struct AttackLosses {
  double rec = 0.0;
  double loc = 0.0;
};

struct LossBundle {
  torch::Tensor l_prt, l_rec, l_loc, l_null, l_adv;
  torch::Tensor total;
  TermWeights weights;
  std::map<std::string, AttackLosses> per_attack;
};

// total = w_rec * l_rec + w_prt * l_prt + beta * l_loc + gamma * l_null
// + omega * l_adv, with (w_rec, w_prt) = (1, alpha) outside the stage-1
// override. Throws TrainingError when any component is non-finite.
LossBundle ComputeLosses(const LossInputs& in, const HyperParams& hp, const TermWeights& weights);
LossBundle ComputeLosses(const LossInputs& in, const HyperParams& hp);

struct DiscriminatorLosses {
  torch::Tensor d_a;
  torch::Tensor d_b;
};

// -1/2 (log D(real) + log(1 - D(fake))) for each discriminator.
torch::Tensor DiscriminatorLoss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores);
DiscriminatorLosses ComputeDiscriminatorLosses(const torch::Tensor& d_a_real, const torch::Tensor& d_a_fake,
                                               const torch::Tensor& d_b_real, const torch::Tensor& d_b_fake);

}  // namespace immunet::training

#endif  // IMMUNET_TRAINING_LOSSES_H_
