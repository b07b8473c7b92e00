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
#include <opencv2/imgproc.hpp>

#include "immunet/detectors/morphology.h"
#include "immunet/detectors/networks.h"
#include "immunet/errors.h"
#include "immunet/training/losses.h"
#include "immunet/training/trainer.h"
#include "test_util.h"

namespace immunet::detectors {
namespace {

using testing::BruteForceFilter;
using testing::Gen;

torch::Tensor ReferencePostprocess(const torch::Tensor& soft, const MaskPostprocessParams& p) {
  auto b = (soft > p.threshold).to(torch::kFloat);
  return BruteForceFilter(BruteForceFilter(b, p.erosion, false), p.dilation, true);
}

torch::Tensor OpenCvPostprocess(const torch::Tensor& soft, const MaskPostprocessParams& p) {
  auto bytes = (soft.reshape({soft.size(-2), soft.size(-1)}) > p.threshold).to(torch::kUInt8).contiguous();
  cv::Mat b(static_cast<int>(bytes.size(0)), static_cast<int>(bytes.size(1)), CV_8U, bytes.data_ptr<uint8_t>());
  cv::Mat eroded, dilated;
  const auto square = [](int64_t k) { return cv::Mat::ones(static_cast<int>(k), static_cast<int>(k), CV_8U); };
  cv::erode(b, eroded, square(p.erosion), cv::Point(-1, -1), 1, cv::BORDER_CONSTANT, cv::Scalar(0));
  cv::dilate(eroded, dilated, square(p.dilation), cv::Point(-1, -1), 1, cv::BORDER_CONSTANT, cv::Scalar(0));
  return torch::from_blob(dilated.data, {1, 1, dilated.rows, dilated.cols}, torch::kUInt8).to(torch::kFloat);
}

TEST(MorphologyTest, ParamsScaleWithResolution) {
  auto p512 = MaskPostprocessParams::ForResolution(512);
  EXPECT_EQ(p512.erosion, 8);
  EXPECT_EQ(p512.dilation, 16);
  auto p256 = MaskPostprocessParams::ForResolution(256);
  EXPECT_EQ(p256.erosion, 4);
  EXPECT_EQ(p256.dilation, 8);
  auto p64 = MaskPostprocessParams::ForResolution(64);
  EXPECT_EQ(p64.erosion, 1);
  EXPECT_EQ(p64.dilation, 2);
  EXPECT_DOUBLE_EQ(p64.threshold, 0.2);
  MaskPostprocessParams bad;
  bad.threshold = 1.0;
  EXPECT_THROW(bad.Validate(), ContractError);
}

TEST(MorphologyTest, BelowThresholdIsEmpty) {
  EXPECT_EQ(PostprocessMask(torch::full({1, 1, 32, 32}, 0.19f), {}).sum().item<float>(), 0.0f);
}

TEST(MorphologyTest, SinglePixelIsEroded) {
  auto soft = torch::zeros({1, 1, 8, 8});
  soft[0][0][3][4] = 1.0f;
  EXPECT_EQ(PostprocessMask(soft, {}).sum().item<float>(), 0.0f);
}

TEST(MorphologyTest, SolidSquareClosedForm) {
  auto soft = torch::zeros({1, 1, 160, 160});
  soft.slice(2, 48, 112).slice(3, 48, 112) = 0.9f;
  auto out = PostprocessMask(soft, {});
  // Erosion keeps [52, 108]; dilation grows that to [45, 116].
  auto expected = torch::zeros_like(out);
  expected.slice(2, 45, 117).slice(3, 45, 117) = 1.0f;
  EXPECT_TRUE(torch::equal(out, expected));
  EXPECT_TRUE(torch::equal(out, ReferencePostprocess(soft, {})));
}

TEST(MorphologyTest, MatchesBruteForceAndOpenCv) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    // Blurred noise gives blobs of many sizes rather than salt and pepper.
    auto noise = torch::rand({1, 1, 64, 64}, Gen(seed));
    auto soft = torch::avg_pool2d(torch::nn::functional::pad(noise, torch::nn::functional::PadFuncOptions({2, 2, 2, 2}).mode(torch::kReflect)), 5, 1);
    soft = (soft - soft.min()) / (soft.max() - soft.min());
    for (const auto& p : {MaskPostprocessParams{}, MaskPostprocessParams::ForResolution(64), MaskPostprocessParams{0.5, 3, 5}}) {
      auto ours = PostprocessMask(soft, p);
      EXPECT_TRUE(torch::equal(ours, ReferencePostprocess(soft, p))) << seed << " k=" << p.erosion;
      EXPECT_TRUE(torch::equal(ours, OpenCvPostprocess(soft, p))) << seed << " k=" << p.erosion;
    }
  }
}

TEST(MorphologyTest, BorderPixelsCountAsZero) {
  auto full = torch::ones({1, 1, 16, 16});
  auto eroded = Erode(full, 3);
  EXPECT_EQ(eroded[0][0][0][5].item<float>(), 0.0f);
  EXPECT_EQ(eroded[0][0][5][5].item<float>(), 1.0f);
  EXPECT_TRUE(torch::equal(Dilate(torch::zeros({1, 1, 8, 8}), 4), torch::zeros({1, 1, 8, 8})));
}

TEST(MorphologyTest, IdempotentWithUnitKernels) {
  MaskPostprocessParams unit{0.2, 1, 1};
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto out = PostprocessMask(torch::rand({1, 1, 32, 32}, Gen(seed)), {});
    EXPECT_TRUE(torch::equal(PostprocessMask(out, unit), out));
  }
}

TEST(MorphologyTest, BoundedByDilatedBinarization) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto soft = torch::rand({1, 1, 48, 48}, Gen(seed + 50));
    for (const auto& p : {MaskPostprocessParams{}, MaskPostprocessParams{0.6, 2, 6}}) {
      auto out = PostprocessMask(soft, p);
      auto bound = Dilate(Binarize(soft, p.threshold), p.dilation);
      EXPECT_EQ((out * (1 - bound)).sum().item<float>(), 0.0f);
    }
  }
}

TEST(MorphologyTest, SteForwardMatchesAndGradientPasses) {
  auto soft = torch::rand({2, 1, 32, 32}, Gen(7)).requires_grad_(true);
  auto hard = PostprocessMaskSte(soft, MaskPostprocessParams{0.5, 2, 3});
  EXPECT_TRUE(torch::equal(hard.detach(), PostprocessMask(soft.detach(), MaskPostprocessParams{0.5, 2, 3})));
  hard.sum().backward();
  EXPECT_TRUE(torch::equal(soft.grad(), torch::ones_like(soft)));
}

TEST(RectifyTest, IdentityZeroAndLoop) {
  auto x = testing::RandomImage(8, 1, 3, 16, 16);
  EXPECT_TRUE(torch::equal(Rectify(x, torch::zeros({1, 1, 16, 16})), x));
  EXPECT_EQ(Rectify(x, torch::ones({1, 1, 16, 16})).abs().sum().item<float>(), 0.0f);
  auto m = testing::RandomMask(9, 16, 16);
  auto out = Rectify(x, m);
  auto oa = out.accessor<float, 4>(), xa = x.accessor<float, 4>(), ma = m.accessor<float, 4>();
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 16; ++y) {
      for (int v = 0; v < 16; ++v) EXPECT_EQ(oa[0][c][y][v], ma[0][0][y][v] > 0 ? 0.0f : xa[0][c][y][v]);
    }
  }
  EXPECT_THROW(Rectify(x, torch::zeros({1, 1, 8, 16})), ShapeError);
}

TEST(DetectorTest, SoftMaskInUnitRange) {
  torch::manual_seed(10);
  ForgeryDetector detector(DetectorOptions{{3, 8, 2}, -2.0});
  auto m = detector->forward(torch::rand({2, 3, 32, 32}, Gen(11)));
  EXPECT_EQ(m.sizes(), (std::vector<int64_t>{2, 1, 32, 32}));
  EXPECT_GE(m.min().item<float>(), 0.0f);
  EXPECT_LE(m.max().item<float>(), 1.0f);
  detector->eval();
  EXPECT_TRUE(torch::allclose(torch::sigmoid(detector->Logits(torch::rand({1, 3, 16, 16}, Gen(12)))),
                              detector->forward(torch::rand({1, 3, 16, 16}, Gen(12)))));
}

TEST(DetectorTest, ZeroImageIsFiniteForRandomParameters) {
  torch::manual_seed(13);
  ForgeryDetector detector(DetectorOptions{{3, 8, 2}, 0.0});
  testing::RandomizeParameters(*detector, 14, 0.5);
  EXPECT_TRUE(torch::isfinite(detector->forward(torch::zeros({1, 3, 32, 32}))).all().item<bool>());
  EXPECT_THROW(detector->forward(torch::zeros({1, 3, 20, 20})), ContractError);
}

TEST(DiscriminatorTest, PixelwiseGradientReachesInput) {
  torch::manual_seed(15);
  PixelDiscriminator d(DetectorOptions{{3, 8, 2}, 0.0});
  auto x = torch::rand({1, 3, 16, 16}, Gen(16)).requires_grad_(true);
  auto score = d->forward(x);
  EXPECT_EQ(score.sizes(), (std::vector<int64_t>{1, 1, 16, 16}));
  score.mean().backward();
  EXPECT_TRUE(torch::isfinite(x.grad()).all().item<bool>());
  EXPECT_GT(x.grad().abs().sum().item<float>(), 0.0f);
}

TEST(DiscriminatorTest, PatchGridIsSmallerAndDeterministic) {
  torch::manual_seed(17);
  PatchDiscriminator d(PatchDiscriminatorOptions{16});
  d->eval();
  auto x = torch::rand({2, 3, 64, 64}, Gen(18));
  auto a = d->forward(x);
  EXPECT_EQ(a.sizes(), (std::vector<int64_t>{2, 1, 6, 6}));
  EXPECT_TRUE(torch::equal(a, d->forward(x)));
  EXPECT_GE(a.min().item<float>(), 0.0f);
  EXPECT_LE(a.max().item<float>(), 1.0f);
}

TEST(DiscriminatorTest, PatchIsLighterThanPixelwise) {
  auto count = [](torch::nn::Module& m) {
    int64_t n = 0;
    for (const auto& p : m.parameters()) n += p.numel();
    return n;
  };
  const training::ModelOptions defaults;
  PatchDiscriminator d_a(defaults.patch_discriminator);
  PixelDiscriminator d_b(defaults.pixel_discriminator);
  EXPECT_LT(count(*d_a), count(*d_b)) << count(*d_a) << " vs " << count(*d_b);
}

TEST(DiscriminatorTest, ConstantHalfGivesLogTwo) {
  auto half = torch::full({2, 1, 8, 8}, 0.5f);
  EXPECT_NEAR(training::DiscriminatorLoss(half, half).item<double>(), std::log(2.0), 1e-6);
  auto grid = torch::full({2, 1, 6, 6}, 0.5f);
  EXPECT_NEAR(training::DiscriminatorLoss(grid, grid).item<double>(), std::log(2.0), 1e-6);
}

}  // namespace
}  // namespace immunet::detectors
