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

#ifndef IMMUNET_ATTACK_TAMPER_H_
#define IMMUNET_ATTACK_TAMPER_H_

#include <torch/torch.h>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace immunet::attack {

// All tamper operations composite X * (1 - M) + R * M, so pixels outside
// the mask are untouched.
torch::Tensor Composite(const torch::Tensor& x, const torch::Tensor& mask, const torch::Tensor& replacement);

// R = X shifted by (dy, dx) with toroidal wrap: R[i, j] = X[i - dy, j - dx].
torch::Tensor TamperCopyMove(const torch::Tensor& x, const torch::Tensor& mask, int64_t dy, int64_t dx);

// R = donor. Throws ShapeError on mismatch.
torch::Tensor TamperSplice(const torch::Tensor& x, const torch::Tensor& mask, const torch::Tensor& donor);

// (image with hole, mask) -> filled image of the same shape.
using InpaintProvider = std::function<torch::Tensor(const torch::Tensor& holed, const torch::Tensor& mask)>;

// Fills masked pixels by iterated 4-neighbour averaging, starting from the
// per-channel mean of the known pixels.
torch::Tensor DiffusionInpaint(const torch::Tensor& holed, const torch::Tensor& mask, int iterations = 200);

class InpaintRegistry {
 public:
  // Comes with the built-in "diffusion" provider.
  InpaintRegistry();

  void Register(const std::string& name, InpaintProvider provider);
  bool Contains(const std::string& name) const;
  std::vector<std::string> Names() const;
  const InpaintProvider& Get(const std::string& name) const;

 private:
  std::map<std::string, InpaintProvider> providers_;
};

// Runs the named provider on X * (1 - M); when it throws, logs a warning
// and falls back to DiffusionInpaint. Throws ContractError for an
// unregistered name.
torch::Tensor TamperInpaint(const torch::Tensor& x, const torch::Tensor& mask, const InpaintRegistry& registry,
                            const std::string& provider);

}  // namespace immunet::attack

#endif  // IMMUNET_ATTACK_TAMPER_H_
