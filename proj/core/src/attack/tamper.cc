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

#include "immunet/attack/tamper.h"

#include <c10/util/Logging.h>

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::attack {

torch::Tensor Composite(const torch::Tensor& x, const torch::Tensor& mask, const torch::Tensor& replacement) {
  imaging::CheckSameShape(x, replacement, "Composite");
  return x * (1.0 - mask) + replacement * mask;
}

torch::Tensor TamperCopyMove(const torch::Tensor& x, const torch::Tensor& mask, int64_t dy, int64_t dx) {
  imaging::CheckBatch(x, "TamperCopyMove");
  if (dy == 0 && dx == 0) return x;
  return Composite(x, mask, torch::roll(x, {dy, dx}, {2, 3}));
}

torch::Tensor TamperSplice(const torch::Tensor& x, const torch::Tensor& mask, const torch::Tensor& donor) {
  imaging::CheckSameShape(x, donor, "TamperSplice");
  return Composite(x, mask, donor);
}

torch::Tensor DiffusionInpaint(const torch::Tensor& holed, const torch::Tensor& mask, int iterations) {
  torch::NoGradGuard no_grad;
  auto x = holed.detach();
  auto m = mask.detach().expand_as(x);
  auto known = 1.0 - m;
  const double known_count = known.select(1, 0).sum().item<double>();
  torch::Tensor fill;
  if (known_count > 0.0) {
    fill = (x * known).sum({2, 3}, true) / known.sum({2, 3}, true).clamp_min(1.0);
  } else {
    fill = torch::full({x.size(0), x.size(1), 1, 1}, 0.5, x.options());
  }
  auto current = x * known + fill * m;
  namespace F = torch::nn::functional;
  for (int i = 0; i < iterations; ++i) {
    auto padded = F::pad(current, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReplicate));
    using torch::indexing::Slice;
    auto avg = (padded.index({Slice(), Slice(), Slice(0, -2), Slice(1, -1)}) +
                padded.index({Slice(), Slice(), Slice(2, torch::indexing::None), Slice(1, -1)}) +
                padded.index({Slice(), Slice(), Slice(1, -1), Slice(0, -2)}) +
                padded.index({Slice(), Slice(), Slice(1, -1), Slice(2, torch::indexing::None)})) *
               0.25;
    current = x * known + avg * m;
  }
  return current;
}

InpaintRegistry::InpaintRegistry() {
  providers_["diffusion"] = [](const torch::Tensor& holed, const torch::Tensor& mask) {
    return DiffusionInpaint(holed, mask);
  };
}

void InpaintRegistry::Register(const std::string& name, InpaintProvider provider) {
  Require(static_cast<bool>(provider), "InpaintRegistry: empty provider for '" + name + "'");
  providers_[name] = std::move(provider);
}

bool InpaintRegistry::Contains(const std::string& name) const { return providers_.count(name) > 0; }

std::vector<std::string> InpaintRegistry::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : providers_) names.push_back(name);
  return names;
}

const InpaintProvider& InpaintRegistry::Get(const std::string& name) const {
  auto it = providers_.find(name);
  Require(it != providers_.end(), "InpaintRegistry: provider '" + name + "' is not registered");
  return it->second;
}

torch::Tensor TamperInpaint(const torch::Tensor& x, const torch::Tensor& mask, const InpaintRegistry& registry,
                            const std::string& provider) {
  imaging::CheckBatch(x, "TamperInpaint");
  const auto& fn = registry.Get(provider);
  auto holed = x * (1.0 - mask);
  torch::Tensor filled;
  try {
    filled = fn(holed, mask);
    imaging::CheckSameShape(filled, x, "inpaint provider output");
  } catch (const std::exception& e) {
    LOG(WARNING) << "inpaint provider '" << provider << "' failed (" << e.what() << "); using diffusion fill";
    filled = DiffusionInpaint(holed, mask);
  }
  return Composite(x, mask, filled.detach());
}

}  // namespace immunet::attack
