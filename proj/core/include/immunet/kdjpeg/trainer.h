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

#ifndef IMMUNET_KDJPEG_TRAINER_H_
#define IMMUNET_KDJPEG_TRAINER_H_

#include <torch/torch.h>

#include <functional>
#include <string>
#include <vector>

#include "immunet/kdjpeg/kdjpeg.h"

namespace immunet::kdjpeg {

// Clean images with their real-codec versions at every QF class.
class JpegCorpus {
 public:
  // `images` are [3, H, W] or [1, 3, H, W]. Throws ContractError when empty.
  explicit JpegCorpus(const std::vector<torch::Tensor>& images);

  int64_t size() const { return plain_.size(0); }
  const torch::Tensor& plain() const { return plain_; }             // [M, 3, H, W]
  const torch::Tensor& compressed(int64_t qf_index) const { return compressed_[static_cast<size_t>(qf_index)]; }

 private:
  torch::Tensor plain_;
  std::vector<torch::Tensor> compressed_;
};

struct KdJpegTrainConfig {
  int64_t batch_size = 16;
  int64_t predictor_epochs = 60;
  // Stop predictor training once an epoch's training accuracy reaches this.
  double predictor_target_accuracy = 0.97;
  int64_t generator_epochs = 30;
  // Teacher-only epochs before the student joins.
  int64_t teacher_warmup_epochs = 3;
  double predictor_lr = 1e-3;
  double generator_lr = 1e-4;
  double epsilon = 0.1;
  StudentNoise student_noise;
  uint64_t seed = 7;
  // Called after every epoch with (stage, epoch, metric).
  std::function<void(const std::string&, int64_t, double)> on_epoch;
};

struct KdJpegTrainStats {
  std::vector<double> predictor_accuracy;  // per epoch, training set
  std::vector<double> teacher_loss;        // per epoch mean
  std::vector<double> student_loss;        // per epoch mean; empty during warm-up
};

// Stage 1: trains the predictor on real-codec images with L_QF.
void TrainPredictor(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config, KdJpegTrainStats& stats);

// Stage 2: trains teacher then student with the predictor frozen.
void TrainGenerators(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config,
                     KdJpegTrainStats& stats);

// Both stages. Throws ContractError on an empty corpus.
KdJpegTrainStats TrainKdJpeg(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config);

// Fraction of (image, QF) pairs of the corpus the predictor classifies right.
double PredictorAccuracy(KdJpeg& model, const JpegCorpus& corpus, int64_t batch_size = 64);

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_TRAINER_H_
