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

#include "immunet/training/augment.h"

#include <cmath>
#include <numbers>

#include "immunet/attack/mask.h"
#include "immunet/attack/tamper.h"
#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::training {

PretamperResult PretamperAugment(const torch::Tensor& batch, const std::vector<torch::Tensor>& donors, double r_aug,
                                 Rng& rng, const attack::MaskSpec& mask, const attack::PlanSampling& sampling) {
  Require(r_aug >= 0.0 && r_aug <= 1.0, "PretamperAugment: r_aug must lie in [0, 1]");
  auto images = imaging::AsBatch(batch);
  const int64_t n = images.size(0), h = images.size(2), w = images.size(3);
  PretamperResult out;
  out.fixed_masks.resize(static_cast<size_t>(n));
  std::vector<torch::Tensor> items;
  for (int64_t i = 0; i < n; ++i) {
    auto item = images.narrow(0, i, 1);
    if (!donors.empty() && rng.Bernoulli(r_aug)) {
      attack::MaskSpec spec = mask;
      spec.target_rate = rng.Uniform(sampling.min_rate, sampling.max_rate);
      auto m = attack::GenerateFreeformMask(h, w, spec, rng.NextU64()).to(item.options());
      const auto& donor = donors[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(donors.size()) - 1))];
      item = attack::TamperSplice(item, m, imaging::AsBatch(donor).to(item.options()));
      out.fixed_masks[static_cast<size_t>(i)] = m;
    }
    items.push_back(item);
  }
  out.images = torch::cat(items, 0);
  return out;
}

std::vector<std::vector<attack::PostParams>> SampleExpansionParams(const std::vector<attack::PostKind>& kinds,
                                                                   int64_t n, Rng& rng) {
  std::vector<std::vector<attack::PostParams>> params(kinds.size());
  for (size_t j = 0; j < kinds.size(); ++j) {
    for (int64_t i = 0; i < n; ++i) params[j].push_back(attack::SamplePostParams(kinds[j], rng));
  }
  return params;
}

ExpandedBatch ExpandBatchAsymmetric(const torch::Tensor& tampered, const torch::Tensor& mask,
                                    const std::vector<attack::PostKind>& kinds,
                                    const std::vector<std::vector<attack::PostParams>>& params,
                                    attack::JpegSimulator* jpeg) {
  auto x = imaging::AsBatch(tampered);
  const int64_t n = x.size(0);
  Require(n >= 1, "ExpandBatchAsymmetric: empty batch");
  Require(!kinds.empty() && params.size() == kinds.size(), "ExpandBatchAsymmetric: parameter table mismatch");
  auto m = mask.defined() ? imaging::AsBatch(mask).to(x.options().requires_grad(false))
                          : torch::zeros({n, 1, x.size(2), x.size(3)}, x.options().requires_grad(false));
  std::vector<torch::Tensor> images, masks, valids;
  ExpandedBatch out;
  for (size_t j = 0; j < kinds.size(); ++j) {
    Require(static_cast<int64_t>(params[j].size()) == n, "ExpandBatchAsymmetric: parameter table mismatch");
    for (int64_t i = 0; i < n; ++i) {
      auto post = attack::Postprocess(x.narrow(0, i, 1), kinds[j], params[j][static_cast<size_t>(i)], jpeg);
      auto item_mask = m.narrow(0, i, 1);
      auto valid = attack::CropValidity(item_mask, post.crop);
      images.push_back(post.image);
      masks.push_back(item_mask * valid);
      valids.push_back(valid);
      out.crops.push_back(post.crop);
    }
  }
  out.images = torch::cat(images, 0);
  out.mask = torch::cat(masks, 0);
  out.valid = torch::cat(valids, 0);
  return out;
}

double CosineLr(int64_t step, int64_t last, double base, double floor) {
  if (last <= 0) return base;
  const double t = std::clamp(static_cast<double>(step) / static_cast<double>(last), 0.0, 1.0);
  return floor + (base - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace immunet::training
