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

#include <gtest/gtest.h>
#include <torch/torch.h>

#include <cmath>

#include "immunet/errors.h"
#include "immunet/imaging/metrics.h"
#include "immunet/imaging/quantize.h"
#include "immunet/kdjpeg/codec.h"
#include "immunet/kdjpeg/generator.h"
#include "immunet/kdjpeg/kdjpeg.h"
#include "immunet/kdjpeg/losses.h"
#include "immunet/kdjpeg/predictor.h"
#include "immunet/kdjpeg/qf.h"
#include "immunet/kdjpeg/trainer.h"
#include "immunet/pipeline/synthetic.h"
#include "test_util.h"

namespace immunet::kdjpeg {
namespace {

using testing::Gen;

KdJpegOptions SmallOptions() {
  KdJpegOptions o;
  o.generator = {3, 8, 1};
  o.predictor.width = 8;
  o.modulator_hidden = 16;
  return o;
}

TEST(QfClassTest, Labels) {
  EXPECT_EQ(QfClass::FromQuality(50).index(), 2);
  EXPECT_TRUE(QfClass::FromQuality(100).uncompressed());
  EXPECT_THROW(QfClass::FromQuality(80), ContractError);
  EXPECT_EQ(QfClass::Nearest(85).quality(), 90);
  EXPECT_EQ(QfClass::Nearest(12).quality(), 10);
  EXPECT_EQ(QfClass::Nearest(97).quality(), 100);
  EXPECT_EQ(OneHot(torch::tensor({0, 5})).sum(1).sum().item<float>(), 2.0f);
}

TEST(RealJpegTest, Quality100OnlyQuantizes) {
  auto x = torch::rand({1, 3, 32, 32}, Gen(1));
  EXPECT_TRUE(torch::equal(RealJpeg(x, 100), imaging::Quantize8Bit(x)));
}

TEST(RealJpegTest, LowerQualityLosesMore) {
  auto image = pipeline::SyntheticImage(64, 3).unsqueeze(0);
  EXPECT_LT(imaging::Psnr(image, RealJpeg(image, 10)), imaging::Psnr(image, RealJpeg(image, 90)));
}

TEST(RealJpegTest, Deterministic) {
  auto image = pipeline::SyntheticImage(32, 4).unsqueeze(0);
  EXPECT_TRUE(torch::equal(RealJpeg(image, 30), RealJpeg(image, 30)));
}

TEST(RealJpegTest, SimulatorPassesGradient) {
  RealJpegSimulator sim;
  auto x = pipeline::SyntheticImage(32, 5).unsqueeze(0).requires_grad_(true);
  auto y = sim.Compress(x, 50);
  EXPECT_TRUE(torch::equal(y.detach(), RealJpeg(x.detach(), 50)));
  y.sum().backward();
  EXPECT_TRUE(torch::equal(x.grad(), torch::ones_like(x)));
}

TEST(PredictorTest, ProbabilitiesAreSoftmax) {
  torch::manual_seed(6);
  QfPredictor predictor(QfPredictorOptions{8});
  auto p = predictor->Probabilities(torch::rand({4, 3, 32, 32}, Gen(7)));
  EXPECT_EQ(p.sizes(), (std::vector<int64_t>{4, 6}));
  EXPECT_LT((p.sum(1) - 1).abs().max().item<float>(), 1e-6f);
  EXPECT_GE(p.min().item<float>(), 0.0f);
}

TEST(PredictorTest, SrmKernelsAreFixedHighPass) {
  auto k = SrmKernels(3);
  EXPECT_EQ(k.sizes(), (std::vector<int64_t>{9, 1, 5, 5}));
  EXPECT_LT(k.sum({1, 2, 3}).abs().max().item<float>(), 1e-6f);
  torch::manual_seed(8);
  QfPredictor predictor(QfPredictorOptions{8});
  for (const auto& p : predictor->named_parameters()) EXPECT_EQ(p.key().find("srm"), std::string::npos) << p.key();
  EXPECT_TRUE(torch::equal(predictor->named_buffers()["srm"], k));
}

void ExpectBayarForm(const torch::Tensor& weight) {
  auto flat = weight.view({weight.size(0), weight.size(1), -1});
  EXPECT_LT((flat.select(2, 12) + 1).abs().max().item<float>(), 1e-5f);
  EXPECT_LT(flat.sum(-1).abs().max().item<float>(), 1e-5f);
}

TEST(PredictorTest, BayarConstraintSurvivesOptimizerSteps) {
  torch::manual_seed(9);
  QfPredictor predictor(QfPredictorOptions{8});
  ExpectBayarForm(predictor->bayar->weight);
  torch::optim::Adam opt(predictor->parameters(), torch::optim::AdamOptions(1e-2));
  auto x = torch::rand({4, 3, 16, 16}, Gen(10));
  auto target = torch::tensor({0, 1, 2, 3});
  for (int step = 0; step < 5; ++step) {
    opt.zero_grad();
    QfLoss(predictor->Probabilities(x), target).backward();
    opt.step();
    predictor->ApplyConstraints();
    auto flat = predictor->bayar->weight.view({3, 3, -1});
    EXPECT_LT((flat.select(2, 12) + 1).abs().max().item<float>(), 1e-5f);
    // Ring taps sum to 1, so the whole kernel sums to 0.
    EXPECT_LT(flat.sum(-1).abs().max().item<float>(), 1e-5f);
  }
}

TEST(GeneratorTest, ModulationIdentityAndZeroScale) {
  auto f = torch::randn({2, 4, 8, 8}, Gen(11));
  auto ones = torch::ones({2, 4}), zeros = torch::zeros({2, 4});
  EXPECT_TRUE(torch::equal(JpegGeneratorImpl::ModulatedBlock(f, ones, zeros), f));
  auto b = torch::randn({2, 4}, Gen(12));
  auto out = JpegGeneratorImpl::ModulatedBlock(f, zeros, b);
  EXPECT_TRUE(torch::allclose(out, b.view({2, 4, 1, 1}).expand_as(f)));
}

TEST(GeneratorTest, FreshModulatorIsNeutral) {
  torch::manual_seed(13);
  QfModulator modulator(std::array<int64_t, 3>{8, 16, 32}, 16);
  auto m = modulator->forward(OneHot(torch::tensor({0, 3, 5})));
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(torch::equal(m.scale[i], torch::ones_like(m.scale[i])));
    EXPECT_TRUE(torch::equal(m.shift[i], torch::zeros_like(m.shift[i])));
  }
}

TEST(GeneratorTest, StudentIsDifferentiableForEveryClass) {
  torch::manual_seed(14);
  KdJpeg model(SmallOptions());
  for (int64_t c = 0; c < kQfClassCount; ++c) {
    auto x = torch::rand({1, 3, 16, 16}, Gen(15)).requires_grad_(true);
    auto out = model->SimulateStudent(PlainImage{x}, QfIndexBatch(QfClass::FromIndex(c), 1));
    EXPECT_EQ(out.image.sizes(), x.sizes());
    EXPECT_GE(out.image.min().item<float>(), 0.0f);
    EXPECT_LE(out.image.max().item<float>(), 1.0f);
    out.image.sum().backward();
    EXPECT_TRUE(torch::isfinite(x.grad()).all().item<bool>()) << c;
    EXPECT_GT(x.grad().abs().sum().item<float>(), 0.0f) << c;
  }
}

TEST(KdLossTest, UniformPredictionIsLogSix) {
  auto p = torch::full({5, 6}, 1.0f / 6.0f);
  EXPECT_NEAR(CrossEntropy(p, torch::tensor({0, 1, 2, 3, 4})).item<double>(), std::log(6.0), 1e-6);
}

TEST(KdLossTest, ConfidentCorrectPredictionIsNearZero) {
  auto target = torch::tensor({1, 4});
  EXPECT_LE(CrossEntropy(OneHot(target), target).item<double>(), 1e-6 + 1e-9);
}

TEST(KdLossTest, PerfectStudentHasZeroLoss) {
  auto img = torch::rand({2, 3, 8, 8}, Gen(16));
  std::array<torch::Tensor, 3> features = {torch::rand({2, 4, 4, 4}), torch::rand({2, 8, 2, 2}), torch::rand({2, 16, 1, 1})};
  auto target = torch::tensor({2, 3});
  auto loss = StudentLoss(img, img, OneHot(target), target, features, features, 0.1);
  EXPECT_NEAR(loss.item<double>(), 0.0, 1e-6);
}

TEST(KdLossTest, UnitFeatureGapSumsToThree) {
  auto img = torch::rand({2, 3, 8, 8}, Gen(17));
  std::array<torch::Tensor, 3> tea = {torch::rand({2, 4, 4, 4}), torch::rand({2, 8, 2, 2}), torch::rand({2, 16, 1, 1})};
  std::array<torch::Tensor, 3> stu = {tea[0] + 1, tea[1] + 1, tea[2] + 1};
  auto target = torch::tensor({0, 5});
  auto p = OneHot(target);
  auto gap = StudentLoss(img, img, p, target, stu, tea, 0.1) - StudentLoss(img, img, p, target, tea, tea, 0.1);
  EXPECT_NEAR(gap.item<double>(), 3.0, 1e-5);
}

TEST(KdLossTest, TeacherLossWeightsCrossEntropy) {
  auto a = torch::zeros({1, 3, 4, 4}), b = torch::full({1, 3, 4, 4}, 0.5f);
  auto uniform = torch::full({1, 6}, 1.0f / 6.0f);
  EXPECT_NEAR(TeacherLoss(a, b, uniform, torch::tensor({2}), 0.1).item<double>(), 0.5 + 0.1 * std::log(6.0), 1e-6);
}

TEST(KdTrainerTest, EmptyCorpusRejected) { EXPECT_THROW(JpegCorpus({}), ContractError); }

TEST(KdTrainerTest, GeneratorStageFreezesPredictorAndLearnsModulation) {
  torch::manual_seed(18);
  KdJpeg model(SmallOptions());
  JpegCorpus corpus(pipeline::SyntheticCorpus(8, 16, 19));
  std::vector<torch::Tensor> before;
  for (const auto& p : model->predictor->parameters()) before.push_back(p.detach().clone());

  KdJpegTrainConfig config;
  config.batch_size = 8;
  config.generator_epochs = 3;
  config.teacher_warmup_epochs = 1;
  config.generator_lr = 1e-3;
  KdJpegTrainStats stats;
  TrainGenerators(model, corpus, config, stats);

  auto after = model->predictor->parameters();
  ASSERT_EQ(after.size(), before.size());
  for (size_t i = 0; i < before.size(); ++i) EXPECT_TRUE(torch::equal(after[i], before[i])) << i;
  EXPECT_EQ(stats.teacher_loss.size(), 3u);
  EXPECT_EQ(stats.student_loss.size(), 2u);

  torch::NoGradGuard no_grad;
  auto m = model->student->modulator->forward(OneHot(torch::arange(6)));
  EXPECT_GT((m.scale[0][0] - m.scale[0][5]).abs().max().item<float>() +
                (m.shift[0][0] - m.shift[0][5]).abs().max().item<float>(),
            0.0f);
}

TEST(KdTrainerTest, PredictorStageImprovesAccuracy) {
  torch::manual_seed(20);
  KdJpeg model(SmallOptions());
  JpegCorpus corpus(pipeline::SyntheticCorpus(12, 32, 21));
  const double initial = PredictorAccuracy(model, corpus);
  KdJpegTrainConfig config;
  config.batch_size = 12;
  config.predictor_epochs = 8;
  config.predictor_target_accuracy = 1.1;
  KdJpegTrainStats stats;
  TrainPredictor(model, corpus, config, stats);
  EXPECT_EQ(stats.predictor_accuracy.size(), 8u);
  EXPECT_GT(stats.predictor_accuracy.back(), initial);
  auto flat = model->predictor->bayar->weight.view({3, 3, -1});
  EXPECT_LT((flat.select(2, 12) + 1).abs().max().item<float>(), 1e-5f);
}

TEST(StudentSimulatorTest, SnapsQualityToClasses) {
  torch::manual_seed(22);
  KdJpeg model(SmallOptions());
  {
    torch::NoGradGuard no_grad;
    model->student->unet->projection->weight.normal_(0, 0.1);
  }
  model->eval();
  StudentJpegSimulator sim(model);
  auto x = torch::rand({1, 3, 16, 16}, Gen(23));
  EXPECT_TRUE(torch::equal(sim.Compress(x, 100), x));
  EXPECT_TRUE(torch::equal(sim.Compress(x, 97), x));
  EXPECT_TRUE(torch::equal(sim.Compress(x, 80), sim.Compress(x, 70)));
  EXPECT_FALSE(torch::equal(sim.Compress(x, 10), x));
}

}  // namespace
}  // namespace immunet::kdjpeg
