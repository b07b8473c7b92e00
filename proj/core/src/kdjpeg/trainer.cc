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

#include "immunet/kdjpeg/trainer.h"

#include <algorithm>
#include <numeric>

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"
#include "immunet/kdjpeg/codec.h"
#include "immunet/kdjpeg/losses.h"

namespace immunet::kdjpeg {

namespace {

std::vector<int64_t> Shuffled(int64_t n, Rng& rng) {
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates on the platform-stable stream.
  for (int64_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.UniformInt(0, i)]);
  return order;
}

torch::Tensor IndexTensor(const std::vector<int64_t>& v) { return torch::tensor(v, torch::kLong); }

void SetRequiresGrad(torch::nn::Module& m, bool flag) {
  for (auto& p : m.parameters()) p.set_requires_grad(flag);
}

// Gathers the compressed versions of (image, qf) pairs.
torch::Tensor GatherCompressed(const JpegCorpus& corpus, const std::vector<int64_t>& images,
                               const std::vector<int64_t>& qfs) {
  std::vector<torch::Tensor> items;
  items.reserve(images.size());
  for (size_t k = 0; k < images.size(); ++k) items.push_back(corpus.compressed(qfs[k])[images[k]]);
  return torch::stack(items);
}

}  // namespace

JpegCorpus::JpegCorpus(const std::vector<torch::Tensor>& images) {
  Require(!images.empty(), "JpegCorpus: empty corpus");
  std::vector<torch::Tensor> batch;
  for (const auto& img : images) batch.push_back(imaging::AsBatch(img).squeeze(0).to(torch::kFloat));
  plain_ = torch::stack(batch);
  imaging::CheckChannels(plain_, 3, "JpegCorpus");
  for (int q : kQfLabels) compressed_.push_back(RealJpeg(plain_, q));
}

double PredictorAccuracy(KdJpeg& model, const JpegCorpus& corpus, int64_t batch_size) {
  torch::NoGradGuard no_grad;
  const bool was_training = model->predictor->is_training();
  model->predictor->eval();
  int64_t correct = 0, total = 0;
  for (int64_t q = 0; q < kQfClassCount; ++q) {
    const auto& images = corpus.compressed(q);
    for (int64_t start = 0; start < images.size(0); start += batch_size) {
      const int64_t len = std::min(batch_size, images.size(0) - start);
      auto pred = model->predictor->forward(images.narrow(0, start, len)).argmax(1);
      correct += (pred == q).sum().item<int64_t>();
      total += len;
    }
  }
  model->predictor->train(was_training);
  return static_cast<double>(correct) / static_cast<double>(total);
}

void TrainPredictor(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config, KdJpegTrainStats& stats) {
  Rng rng(config.seed);
  auto& predictor = model->predictor;
  predictor->train();
  SetRequiresGrad(*predictor, true);
  torch::optim::Adam optimizer(predictor->parameters(), torch::optim::AdamOptions(config.predictor_lr));
  const int64_t pairs = corpus.size() * kQfClassCount;
  for (int64_t epoch = 0; epoch < config.predictor_epochs; ++epoch) {
    const auto order = Shuffled(pairs, rng);
    for (int64_t start = 0; start < pairs; start += config.batch_size) {
      const int64_t len = std::min(config.batch_size, pairs - start);
      std::vector<int64_t> images, qfs;
      for (int64_t k = start; k < start + len; ++k) {
        images.push_back(order[k] / kQfClassCount);
        qfs.push_back(order[k] % kQfClassCount);
      }
      auto target = IndexTensor(qfs);
      auto loss = QfLoss(predictor->Probabilities(GatherCompressed(corpus, images, qfs)), target);
      optimizer.zero_grad();
      loss.backward();
      optimizer.step();
      predictor->ApplyConstraints();
    }
    const double accuracy = PredictorAccuracy(model, corpus);
    stats.predictor_accuracy.push_back(accuracy);
    if (config.on_epoch) config.on_epoch("predictor", epoch, accuracy);
    if (accuracy >= config.predictor_target_accuracy) break;
  }
}

void TrainGenerators(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config,
                     KdJpegTrainStats& stats) {
  Rng rng(config.seed ^ 0x5eedULL);
  model->predictor->eval();
  SetRequiresGrad(*model->predictor, false);
  model->teacher->train();
  model->student->train();
  torch::optim::Adam teacher_opt(model->teacher->parameters(), torch::optim::AdamOptions(config.generator_lr));
  torch::optim::Adam student_opt(model->student->parameters(), torch::optim::AdamOptions(config.generator_lr));
  const int64_t m = corpus.size();
  for (int64_t epoch = 0; epoch < config.generator_epochs; ++epoch) {
    const bool student_active = epoch >= config.teacher_warmup_epochs;
    const auto order = Shuffled(m, rng);
    double teacher_sum = 0.0, student_sum = 0.0;
    int64_t batches = 0;
    for (int64_t start = 0; start < m; start += config.batch_size) {
      const int64_t len = std::min(config.batch_size, m - start);
      std::vector<int64_t> images(order.begin() + start, order.begin() + start + len), qfs;
      for (int64_t k = 0; k < len; ++k) qfs.push_back(rng.UniformInt(0, kQfClassCount - 1));
      auto target = IndexTensor(qfs);
      auto real = GatherCompressed(corpus, images, qfs);
      auto plain = corpus.plain().index_select(0, IndexTensor(images));

      auto tea = model->SimulateTeacher(CompressedImage{real}, target);
      auto tea_loss =
          TeacherLoss(tea.image, real, model->predictor->Probabilities(tea.image), target, config.epsilon);
      teacher_opt.zero_grad();
      tea_loss.backward();
      teacher_opt.step();
      teacher_sum += tea_loss.item<double>();

      if (student_active) {
        std::array<torch::Tensor, 3> targets;
        for (size_t i = 0; i < 3; ++i) targets[i] = tea.features[i].detach();
        auto stu = model->SimulateStudent(PlainImage{plain}, target, config.student_noise, &rng);
        auto stu_loss = StudentLoss(stu.image, real, model->predictor->Probabilities(stu.image), target,
                                    stu.features, targets, config.epsilon);
        student_opt.zero_grad();
        stu_loss.backward();
        student_opt.step();
        student_sum += stu_loss.item<double>();
      }
      ++batches;
    }
    stats.teacher_loss.push_back(teacher_sum / static_cast<double>(batches));
    if (config.on_epoch) config.on_epoch("teacher", epoch, stats.teacher_loss.back());
    if (student_active) {
      stats.student_loss.push_back(student_sum / static_cast<double>(batches));
      if (config.on_epoch) config.on_epoch("student", epoch, stats.student_loss.back());
    }
  }
  model->teacher->eval();
  model->student->eval();
}

KdJpegTrainStats TrainKdJpeg(KdJpeg& model, const JpegCorpus& corpus, const KdJpegTrainConfig& config) {
  Require(corpus.size() > 0, "TrainKdJpeg: empty corpus");
  KdJpegTrainStats stats;
  TrainPredictor(model, corpus, config, stats);
  TrainGenerators(model, corpus, config, stats);
  return stats;
}

}  // namespace immunet::kdjpeg
