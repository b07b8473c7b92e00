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

#ifndef IMMUNET_TRAINING_TRAINER_H_
#define IMMUNET_TRAINING_TRAINER_H_

#include <torch/torch.h>

#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "immunet/attack/plan.h"
#include "immunet/attack/postprocess.h"
#include "immunet/attack/tamper.h"
#include "immunet/detectors/morphology.h"
#include "immunet/detectors/networks.h"
#include "immunet/iinet/iinet.h"
#include "immunet/imaging/canny.h"
#include "immunet/training/hyperparams.h"
#include "immunet/training/losses.h"

namespace immunet::training {

struct ModelOptions {
  iinet::IINetOptions iinet;
  detectors::DetectorOptions detector;
  detectors::DetectorOptions pixel_discriminator{{3, 16, 2}, 0.0};
  detectors::PatchDiscriminatorOptions patch_discriminator{16};
};

struct Models {
  iinet::IINet iinet{nullptr};
  detectors::ForgeryDetector detector{nullptr};
  detectors::PatchDiscriminator d_a{nullptr};
  detectors::PixelDiscriminator d_b{nullptr};

  // Named sub-modules, used for checkpoints.
  std::vector<std::pair<std::string, std::shared_ptr<torch::nn::Module>>> Modules() const;
};

Models MakeModels(const ModelOptions& options);

struct TrainerConfig {
  HyperParams hp;
  int64_t stage1_steps = 2000;
  int64_t stage2_steps = 1000;
  // End stage 1 as soon as the switch criterion holds instead of after
  // stage1_steps.
  bool switch_on_convergence = false;
  // Refuse to enter stage 2 when the switch criterion does not hold.
  bool require_convergence = false;
  attack::PlanSampling sampling;
  attack::MaskSpec mask;
  detectors::MaskPostprocessParams mask_postprocess;
  imaging::CannyOptions canny;
  uint64_t seed = 1;
  // A step's total loss above this multiple of the running median counts
  // toward divergence; `divergence_patience` consecutive such steps abort.
  double divergence_factor = 10.0;
  int64_t divergence_patience = 100;
  std::filesystem::path metrics_csv;  // empty: no log
};

struct StepReport {
  int64_t step = 0;
  int stage = 1;
  double lr = 0.0;
  double l_prt = 0, l_rec = 0, l_loc = 0, l_null = 0, l_adv = 0, total = 0;
  double l_da = 0, l_db = 0;
  std::map<std::string, AttackLosses> per_attack;
};

// Owns the optimizers and runs both stages. Models must already be built;
// the JPEG simulator (normally the trained KD-JPEG student) is borrowed
// and kept frozen. Images are [3, H, W] at the training resolution.
class Trainer {
 public:
  Trainer(Models models, attack::JpegSimulator* jpeg, std::vector<torch::Tensor> images, TrainerConfig config);

  StepReport Step();
  // Steps until the schedule ends or `max_steps` more steps have run (-1:
  // no limit). `on_step` may return false to stop early.
  void Run(int64_t max_steps = -1, const std::function<bool(const StepReport&)>& on_step = {});

  bool Done() const;
  int64_t step() const { return step_; }
  int stage() const;
  int64_t TotalSteps() const { return config_.stage1_steps + config_.stage2_steps; }
  bool Stage1Converged() const;

  Models& models() { return models_; }
  const TrainerConfig& config() const { return config_; }
  attack::InpaintRegistry& inpaint() { return inpaint_; }

  // Optimizer moments, schedule position and guard histories as named
  // tensors, so a checkpoint can resume bit-for-bit.
  std::map<std::string, torch::Tensor> ExportState();
  void ImportState(const std::map<std::string, torch::Tensor>& state);

 private:
  void SetLr(double lr);
  void CheckDivergence(double total);
  void AppendMetrics(const StepReport& r);

  Models models_;
  attack::JpegSimulator* jpeg_;
  std::vector<torch::Tensor> images_;
  TrainerConfig config_;
  attack::InpaintRegistry inpaint_;
  std::unique_ptr<torch::optim::Adam> opt_iinet_, opt_detector_, opt_discriminators_;
  int64_t step_ = 0;
  int64_t stage2_start_ = -1;
  std::deque<double> loc_history_;
  std::deque<double> total_history_;
  int64_t diverging_steps_ = 0;
  std::ofstream metrics_;
};

}  // namespace immunet::training

#endif  // IMMUNET_TRAINING_TRAINER_H_
