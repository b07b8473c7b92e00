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

#include "immunet/training/losses.h"

#include <sstream>

#include "immunet/errors.h"

namespace immunet::training {

torch::Tensor ClampedLog(const torch::Tensor& p) { return torch::log(p.clamp(kLogFloor, 1.0 - kLogFloor)); }

torch::Tensor Bce(const torch::Tensor& probabilities, const torch::Tensor& target, const torch::Tensor& weight) {
  auto per_pixel = -(target * ClampedLog(probabilities) + (1.0 - target) * ClampedLog(1.0 - probabilities));
  if (!weight.defined()) return per_pixel.mean();
  auto w = weight.expand_as(per_pixel);
  return (per_pixel * w).sum() / w.sum().clamp_min(1.0);
}

torch::Tensor MaskedL1(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& weight) {
  auto diff = (a - b).abs();
  if (!weight.defined()) return diff.mean();
  auto w = weight.expand_as(diff);
  return (diff * w).sum() / w.sum().clamp_min(1.0);
}

namespace {

class ScaleGradientFn : public torch::autograd::Function<ScaleGradientFn> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* ctx, const torch::Tensor& x, double scale) {
    ctx->saved_data["scale"] = scale;
    return x.view_as(x);
  }
  static torch::autograd::tensor_list backward(torch::autograd::AutogradContext* ctx,
                                               torch::autograd::tensor_list grads) {
    return {grads[0] * ctx->saved_data["scale"].toDouble(), torch::Tensor()};
  }
};

void CheckFinite(const LossBundle& b) {
  const std::pair<const char*, const torch::Tensor*> terms[] = {
      {"l_prt", &b.l_prt}, {"l_rec", &b.l_rec}, {"l_loc", &b.l_loc},
      {"l_null", &b.l_null}, {"l_adv", &b.l_adv}, {"total", &b.total}};
  for (const auto& [name, t] : terms) {
    if (!torch::isfinite(*t).item<bool>()) {
      std::ostringstream msg;
      msg << "non-finite loss component " << name << ":";
      for (const auto& [n2, t2] : terms) msg << ' ' << n2 << '=' << t2->item<double>();
      throw TrainingError(msg.str());
    }
  }
}

}  // namespace

torch::Tensor ScaleGradient(const torch::Tensor& x, double scale) { return ScaleGradientFn::apply(x, scale); }

LossBundle ComputeLosses(const LossInputs& in, const HyperParams& hp) { return ComputeLosses(in, hp, {1.0, hp.alpha}); }

LossBundle ComputeLosses(const LossInputs& in, const HyperParams& hp, const TermWeights& weights) {
  const int64_t n = in.original.size(0);
  const int64_t total_items = in.recovered.size(0);
  RequireShape(total_items % n == 0, "ComputeLosses: recovery batch is not a multiple of n");
  const int64_t attacks = total_items / n;
  RequireShape(in.attack_names.empty() || static_cast<int64_t>(in.attack_names.size()) == attacks,
               "ComputeLosses: attack label count mismatch");

  auto original = in.original.repeat({attacks, 1, 1, 1});
  auto edges = in.edges.repeat({attacks, 1, 1, 1});

  LossBundle b;
  b.weights = weights;
  b.l_prt = MaskedL1(in.original, in.immunized);
  b.l_rec = MaskedL1(original, in.recovered, in.valid) + MaskedL1(edges, in.recovered_edges, in.valid);
  b.l_loc = Bce(in.soft_mask, in.mask, in.valid);
  b.l_null = in.null_channel.abs().mean();
  b.l_adv = ClampedLog(1.0 - in.d_a_fake).mean() + ClampedLog(1.0 - in.d_b_fake).mean();
  b.total = weights.rec * b.l_rec + weights.prt * b.l_prt + hp.beta * b.l_loc + hp.gamma * b.l_null +
            hp.omega * b.l_adv;
  CheckFinite(b);

  if (!in.attack_names.empty()) {
    torch::NoGradGuard no_grad;
    for (int64_t j = 0; j < attacks; ++j) {
      auto slice = [&](const torch::Tensor& t) { return t.defined() ? t.narrow(0, j * n, n) : t; };
      AttackLosses a;
      a.rec = (MaskedL1(in.original, slice(in.recovered), slice(in.valid)) +
               MaskedL1(in.edges, slice(in.recovered_edges), slice(in.valid)))
                  .item<double>();
      a.loc = Bce(slice(in.soft_mask), slice(in.mask), slice(in.valid)).item<double>();
      b.per_attack[in.attack_names[static_cast<size_t>(j)]] = a;
    }
  }
  return b;
}

torch::Tensor DiscriminatorLoss(const torch::Tensor& real_scores, const torch::Tensor& fake_scores) {
  return -0.5 * (ClampedLog(real_scores).mean() + ClampedLog(1.0 - fake_scores).mean());
}

DiscriminatorLosses ComputeDiscriminatorLosses(const torch::Tensor& d_a_real, const torch::Tensor& d_a_fake,
                                               const torch::Tensor& d_b_real, const torch::Tensor& d_b_fake) {
  return {DiscriminatorLoss(d_a_real, d_a_fake), DiscriminatorLoss(d_b_real, d_b_fake)};
}

}  // namespace immunet::training
