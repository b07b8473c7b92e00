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

#ifndef IMMUNET_ATTACK_MASK_H_
#define IMMUNET_ATTACK_MASK_H_

#include <torch/torch.h>

#include <cstdint>

#include "immunet/attack/plan.h"

namespace immunet::attack {

// Binary free-form mask [1, 1, H, W] built from random-walk brush strokes.
// Strokes are added until mean(mask) lies within target_rate +- tolerance;
// an attempt that overshoots is discarded. Throws ContractError for a
// target outside [0, 0.5] and std::runtime_error when max_attempts attempts
// all miss. Deterministic in (H, W, spec, seed).
torch::Tensor GenerateFreeformMask(int64_t height, int64_t width, const MaskSpec& spec, uint64_t seed);

}  // namespace immunet::attack

#endif  // IMMUNET_ATTACK_MASK_H_
