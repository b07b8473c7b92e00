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

#ifndef IMMUNET_RANDOM_FIELDS_H_
#define IMMUNET_RANDOM_FIELDS_H_

#include <torch/torch.h>

#include <cstdint>

namespace immunet {

// Float tensors filled element by element from Rng(seed), so the values do
// not depend on the torch build.
torch::Tensor UniformField(at::IntArrayRef sizes, uint64_t seed);  // [0, 1)
torch::Tensor NormalField(at::IntArrayRef sizes, uint64_t seed);   // N(0, 1)

}  // namespace immunet

#endif  // IMMUNET_RANDOM_FIELDS_H_
