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

#include "immunet/training/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <c10/util/Logging.h>

#include "immunet/attack/simulate.h"
#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"
#include "immunet/training/augment.h"

namespace immunet::training {

namespace {

uint64_t StepSeed(uint64_t seed, int64_t step) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(step + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SetRequiresGrad(torch::nn::Module& m, bool flag) {
  for (auto& p : m.parameters()) p.set_requires_grad(flag);
}

void CheckGradientsFinite(torch::nn::Module& m, const char* what) {
  for (const auto& item : m.named_parameters()) {
    const auto& g = item.value().grad();
    if (g.defined() && !torch::isfinite(g).all().item<bool>())
      throw TrainingError(std::string("non-finite gradient in ") + what + "." + item.key());
  }
}

double Median(std::vector<double> v) {
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

torch::Tensor HistoryTensor(const std::deque<double>& d) {
  return torch::tensor(std::vector<double>(d.begin(), d.end()), torch::kDouble);
}

std::deque<double> HistoryFrom(const torch::Tensor& t) {
  auto c = t.to(torch::kDouble).contiguous();
  return std::deque<double>(c.data_ptr<double>(), c.data_ptr<double>() + c.numel());
}

constexpr size_t kTotalHistory = 1000;
constexpr double kDivergenceFloor = 1e-3;

void ExportAdam(torch::optim::Adam& opt, const std::string& prefix, std::map<std::string, torch::Tensor>& out) {
  int64_t index = 0;
  for (auto& group : opt.param_groups()) {
    for (auto& p : group.params()) {
      const std::string key = prefix + "/" + std::to_string(index++);
      auto it = opt.state().find(p.unsafeGetTensorImpl());
      if (it == opt.state().end()) continue;
      auto& s = static_cast<torch::optim::AdamParamState&>(*it->second);
      out[key + "/step"] = torch::tensor({s.step()}, torch::kLong);
      out[key + "/exp_avg"] = s.exp_avg().clone();
      out[key + "/exp_avg_sq"] = s.exp_avg_sq().clone();
    }
  }
}

void ImportAdam(torch::optim::Adam& opt, const std::string& prefix, const std::map<std::string, torch::Tensor>& in) {
  int64_t index = 0;
  for (auto& group : opt.param_groups()) {
    for (auto& p : group.params()) {
      const std::string key = prefix + "/" + std::to_string(index++);
      auto step = in.find(key + "/step");
      if (step == in.end()) continue;
      auto s = std::make_unique<torch::optim::AdamParamState>();
      s->step(step->second.item<int64_t>());
      s->exp_avg(in.at(key + "/exp_avg").clone().to(p.options()));
      s->exp_avg_sq(in.at(key + "/exp_avg_sq").clone().to(p.options()));
      RequireShape(s->exp_avg().sizes() == p.sizes(), "optimizer state does not match parameter " + key);
      opt.state()[p.unsafeGetTensorImpl()] = std::move(s);
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, std::shared_ptr<torch::nn::Module>>> Models::Modules() const {
  return {{"iinet", iinet.ptr()}, {"detector", detector.ptr()}, {"d_a", d_a.ptr()}, {"d_b", d_b.ptr()}};
}

Models MakeModels(const ModelOptions& options) {
  Models m;
  m.iinet = iinet::IINet(options.iinet);
  m.detector = detectors::ForgeryDetector(options.detector);
  m.d_a = detectors::PatchDiscriminator(options.patch_discriminator);
  m.d_b = detectors::PixelDiscriminator(options.pixel_discriminator);
  return m;
}

Trainer::Trainer(Models models, attack::JpegSimulator* jpeg, std::vector<torch::Tensor> images, TrainerConfig config)
    : models_(std::move(models)), jpeg_(jpeg), config_(std::move(config)) {
  config_.hp.Validate();
  config_.mask_postprocess.Validate();
  Require(!images.empty(), "Trainer: no training images");
  Require(config_.stage1_steps >= 0 && config_.stage2_steps >= 0, "Trainer: negative step counts");
  const bool needs_jpeg =
      std::find(config_.hp.attacks.begin(), config_.hp.attacks.end(), attack::PostKind::kJpeg) != config_.hp.attacks.end();
  Require(jpeg_ != nullptr || !needs_jpeg, "Trainer: the jpeg attack needs a JPEG simulator");
  for (auto& img : images) {
    auto b = imaging::AsBatch(img).to(torch::kFloat);
    imaging::CheckChannels(b, 3, "Trainer");
    images_.push_back(b);
  }
  for (const auto& img : images_) imaging::CheckSameShape(img, images_.front(), "Trainer images");

  const auto adam = [&] { return torch::optim::AdamOptions(config_.hp.lr); };
  opt_iinet_ = std::make_unique<torch::optim::Adam>(models_.iinet->parameters(), adam());
  opt_detector_ = std::make_unique<torch::optim::Adam>(models_.detector->parameters(), adam());
  auto d_params = models_.d_a->parameters();
  for (auto& p : models_.d_b->parameters()) d_params.push_back(p);
  opt_discriminators_ = std::make_unique<torch::optim::Adam>(d_params, adam());

  if (!config_.metrics_csv.empty()) {
    const bool fresh = !std::filesystem::exists(config_.metrics_csv);
    metrics_.open(config_.metrics_csv, std::ios::app);
    Require(metrics_.good(), "Trainer: cannot open metrics log " + config_.metrics_csv.string());
    if (fresh) {
      metrics_ << "step,stage,lr,l_prt,l_rec,l_loc,l_null,l_adv,total,l_da,l_db";
      for (auto k : config_.hp.attacks) metrics_ << ",rec_" << attack::ToString(k) << ",loc_" << attack::ToString(k);
      metrics_ << '\n';
    }
  }
}

bool Trainer::Stage1Converged() const {
  if (static_cast<int64_t>(loc_history_.size()) < config_.hp.switch_window) return false;
  const double mean = std::accumulate(loc_history_.begin(), loc_history_.end(), 0.0) / loc_history_.size();
  return mean < config_.hp.switch_threshold;
}

int Trainer::stage() const { return stage2_start_ >= 0 && step_ >= stage2_start_ ? 2 : 1; }

bool Trainer::Done() const {
  const int64_t start = stage2_start_ >= 0 ? stage2_start_ : config_.stage1_steps;
  return step_ >= start + config_.stage2_steps;
}

void Trainer::SetLr(double lr) {
  for (auto* opt : {opt_iinet_.get(), opt_detector_.get(), opt_discriminators_.get()}) {
    for (auto& group : opt->param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }
}

void Trainer::CheckDivergence(double total) {
  if (total_history_.size() >= 10) {
    const double median = Median(std::vector<double>(total_history_.begin(), total_history_.end()));
    // The adversarial term is negative, so the total can sit near or below
    // zero; the magnitude floor keeps that from reading as divergence.
    if (total > config_.divergence_factor * std::max(std::abs(median), kDivergenceFloor)) {
      if (++diverging_steps_ >= config_.divergence_patience) {
        std::ostringstream msg;
        msg << "training diverged at step " << step_ << ": total " << total << " exceeded "
            << config_.divergence_factor << "x the running median " << median << " for " << diverging_steps_
            << " consecutive steps";
        throw TrainingError(msg.str());
      }
    } else {
      diverging_steps_ = 0;
    }
  }
  total_history_.push_back(total);
  if (total_history_.size() > kTotalHistory) total_history_.pop_front();
}

StepReport Trainer::Step() {
  Require(!Done(), "Trainer: schedule already finished");
  if (stage2_start_ < 0) {
    const bool converged = Stage1Converged();
    if (step_ >= config_.stage1_steps || (config_.switch_on_convergence && converged)) {
      if (!converged) {
        if (config_.require_convergence)
          throw TrainingError("stage-1 localization loss did not converge below the switch threshold");
        LOG(WARNING) << "entering stage 2 before the localization loss converged";
      }
      stage2_start_ = step_;
      // The stage weights change the scale of the total.
      total_history_.clear();
      diverging_steps_ = 0;
    }
  }
  const int stage = this->stage();
  const auto& hp = config_.hp;
  Rng rng(StepSeed(config_.seed, step_));

  const double lr = CosineLr(step_, TotalSteps() - 1, hp.lr, hp.lr_floor);
  SetLr(lr);
  models_.iinet->train();
  models_.detector->train();
  models_.d_a->train();
  models_.d_b->train();

  // Batch of distinct images when the corpus allows; donors come from the rest.
  const int64_t m = static_cast<int64_t>(images_.size());
  const int64_t n = hp.batch_size;
  std::vector<int64_t> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  for (int64_t i = m - 1; i > 0; --i) std::swap(order[i], order[rng.UniformInt(0, i)]);
  std::vector<torch::Tensor> batch_items, donor_pool;
  for (int64_t i = 0; i < n; ++i) batch_items.push_back(images_[order[i % m]]);
  for (int64_t i = n; i < m; ++i) donor_pool.push_back(images_[order[i]]);
  if (donor_pool.empty()) donor_pool = images_;
  auto clean = torch::cat(batch_items, 0);
  const int64_t h = clean.size(2), w = clean.size(3);

  auto aug = PretamperAugment(clean, donor_pool, hp.r_aug, rng, config_.mask, config_.sampling);
  auto original = aug.images;
  auto edges = imaging::CannyEdge(original, config_.canny);

  auto imm = iinet::Immunize(models_.iinet, original, edges);
  // Emitted copy: a plain clamp (zero gradient once saturated), then STE rounding.
  auto x_q = imaging::QuantizeSte(imm.image.clamp(0.0, 1.0));

  std::vector<torch::Tensor> tampered, masks;
  for (int64_t i = 0; i < n; ++i) {
    auto plan = attack::SamplePlan(rng, attack::PostKind::kIdentity, config_.sampling, h, w);
    const double rate = plan.mask.target_rate;
    plan.mask = config_.mask;
    plan.mask.target_rate = rate;
    const auto& fixed = aug.fixed_masks[static_cast<size_t>(i)];
    torch::Tensor mask;
    if (fixed.defined()) {
      if (plan.tamper == attack::TamperKind::kNone) plan.tamper = attack::TamperKind::kSplicing;
      mask = fixed;
    } else {
      mask = attack::PlanMask(plan, h, w);
    }
    mask = mask.to(x_q.options().requires_grad(false));
    const std::vector<torch::Tensor> donors = {
        donor_pool[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(donor_pool.size()) - 1))]};
    plan.donor_index = 0;
    tampered.push_back(attack::ApplyTamper(x_q.narrow(0, i, 1), mask, plan, donors, inpaint_));
    masks.push_back(mask);
  }
  auto params = SampleExpansionParams(hp.attacks, n, rng);
  auto expanded = ExpandBatchAsymmetric(torch::cat(tampered, 0), torch::cat(masks, 0), hp.attacks, params, jpeg_);
  auto attacked = imaging::QuantizeSte(expanded.images);

  // The detector learns from L_loc at unit weight; the immunizer sees the
  // localization gradient scaled by beta.
  auto soft = models_.detector->forward(ScaleGradient(attacked, hp.beta));
  auto rect_mask = stage == 1 ? expanded.mask : detectors::PostprocessMaskSte(soft, config_.mask_postprocess);
  auto rec = iinet::Recover(models_.iinet, detectors::Rectify(attacked, rect_mask));

  SetRequiresGrad(*models_.d_a, false);
  SetRequiresGrad(*models_.d_b, false);
  LossInputs in;
  in.original = original;
  in.edges = edges;
  in.immunized = imm.image;
  in.null_channel = imm.null_channel;
  in.recovered = rec.image;
  in.recovered_edges = rec.edges;
  in.mask = expanded.mask;
  in.soft_mask = soft;
  in.valid = expanded.valid;
  in.d_a_fake = models_.d_a->forward(imm.image);
  in.d_b_fake = models_.d_b->forward(rec.image);
  for (auto k : hp.attacks) in.attack_names.push_back(attack::ToString(k));
  auto losses = ComputeLosses(in, hp, StageWeights(hp, stage));

  opt_iinet_->zero_grad();
  opt_detector_->zero_grad();
  (losses.total + (1.0 - hp.beta) * losses.l_loc).backward();
  CheckGradientsFinite(*models_.iinet, "iinet");
  CheckGradientsFinite(*models_.detector, "detector");
  opt_iinet_->step();
  opt_detector_->step();

  SetRequiresGrad(*models_.d_a, true);
  SetRequiresGrad(*models_.d_b, true);
  opt_discriminators_->zero_grad();
  auto fake_x = imm.image.detach();
  auto fake_rec = rec.image.detach();
  auto d = ComputeDiscriminatorLosses(models_.d_a->forward(original), models_.d_a->forward(fake_x),
                                      models_.d_b->forward(original), models_.d_b->forward(fake_rec));
  (d.d_a + d.d_b).backward();
  CheckGradientsFinite(*models_.d_a, "d_a");
  CheckGradientsFinite(*models_.d_b, "d_b");
  opt_discriminators_->step();

  StepReport r;
  r.step = step_;
  r.stage = stage;
  r.lr = lr;
  r.l_prt = losses.l_prt.item<double>();
  r.l_rec = losses.l_rec.item<double>();
  r.l_loc = losses.l_loc.item<double>();
  r.l_null = losses.l_null.item<double>();
  r.l_adv = losses.l_adv.item<double>();
  r.total = losses.total.item<double>();
  r.l_da = d.d_a.item<double>();
  r.l_db = d.d_b.item<double>();
  r.per_attack = losses.per_attack;

  CheckDivergence(r.total);
  loc_history_.push_back(r.l_loc);
  if (static_cast<int64_t>(loc_history_.size()) > hp.switch_window) loc_history_.pop_front();
  AppendMetrics(r);
  ++step_;
  return r;
}

void Trainer::Run(int64_t max_steps, const std::function<bool(const StepReport&)>& on_step) {
  for (int64_t k = 0; !Done() && (max_steps < 0 || k < max_steps); ++k) {
    auto report = Step();
    if (on_step && !on_step(report)) break;
  }
}

void Trainer::AppendMetrics(const StepReport& r) {
  if (!metrics_.is_open()) return;
  metrics_ << r.step << ',' << r.stage << ',' << r.lr << ',' << r.l_prt << ',' << r.l_rec << ',' << r.l_loc << ','
           << r.l_null << ',' << r.l_adv << ',' << r.total << ',' << r.l_da << ',' << r.l_db;
  for (auto k : config_.hp.attacks) {
    const auto& a = r.per_attack.at(attack::ToString(k));
    metrics_ << ',' << a.rec << ',' << a.loc;
  }
  metrics_ << '\n';
  metrics_.flush();
}

std::map<std::string, torch::Tensor> Trainer::ExportState() {
  std::map<std::string, torch::Tensor> out;
  ExportAdam(*opt_iinet_, "opt_iinet", out);
  ExportAdam(*opt_detector_, "opt_detector", out);
  ExportAdam(*opt_discriminators_, "opt_discriminators", out);
  out["trainer/step"] = torch::tensor({step_}, torch::kLong);
  out["trainer/stage2_start"] = torch::tensor({stage2_start_}, torch::kLong);
  out["trainer/diverging_steps"] = torch::tensor({diverging_steps_}, torch::kLong);
  out["trainer/loc_history"] = HistoryTensor(loc_history_);
  out["trainer/total_history"] = HistoryTensor(total_history_);
  return out;
}

void Trainer::ImportState(const std::map<std::string, torch::Tensor>& state) {
  auto get = [&](const std::string& k) -> const torch::Tensor& {
    auto it = state.find(k);
    Require(it != state.end(), "trainer state lacks '" + k + "'");
    return it->second;
  };
  step_ = get("trainer/step").item<int64_t>();
  stage2_start_ = get("trainer/stage2_start").item<int64_t>();
  diverging_steps_ = get("trainer/diverging_steps").item<int64_t>();
  loc_history_ = HistoryFrom(get("trainer/loc_history"));
  total_history_ = HistoryFrom(get("trainer/total_history"));
  ImportAdam(*opt_iinet_, "opt_iinet", state);
  ImportAdam(*opt_detector_, "opt_detector", state);
  ImportAdam(*opt_discriminators_, "opt_discriminators", state);
}

}  // namespace immunet::training
