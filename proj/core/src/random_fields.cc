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

#include "immunet/random_fields.h"

#include "immunet/random.h"

namespace immunet {

torch::Tensor UniformField(at::IntArrayRef sizes, uint64_t seed) {
  Rng rng(seed);
  auto out = torch::empty(sizes, torch::kFloat);
  auto* p = out.data_ptr<float>();
  for (int64_t i = 0; i < out.numel(); ++i) p[i] = static_cast<float>(rng.Uniform());
  return out;
}

torch::Tensor NormalField(at::IntArrayRef sizes, uint64_t seed) {
  Rng rng(seed);
  auto out = torch::empty(sizes, torch::kFloat);
  auto* p = out.data_ptr<float>();
  for (int64_t i = 0; i < out.numel(); ++i) p[i] = static_cast<float>(rng.Normal());
  return out;
}

}  // namespace immunet
