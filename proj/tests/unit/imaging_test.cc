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
#include <set>

#include "immunet/errors.h"
#include "immunet/imaging/canny.h"
#include "immunet/imaging/haar.h"
#include "immunet/imaging/image_io.h"
#include "immunet/imaging/metrics.h"
#include "immunet/imaging/quantize.h"
#include "test_util.h"

namespace immunet::imaging {
namespace {

using testing::Gen;
using testing::RandomImage;

// Direct 2x2 block transform, one (channel, block) at a time.
torch::Tensor HaarByBlocks(const torch::Tensor& x) {
  const int64_t c = x.size(1), h = x.size(2), w = x.size(3);
  auto out = torch::zeros({1, 4 * c, h / 2, w / 2}, torch::kDouble);
  auto xd = x.to(torch::kDouble);
  auto src = xd.accessor<double, 4>();
  auto dst = out.accessor<double, 4>();
  const double basis[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t y = 0; y < h / 2; ++y) {
      for (int64_t xx = 0; xx < w / 2; ++xx) {
        const double v[4] = {src[0][ch][2 * y][2 * xx], src[0][ch][2 * y][2 * xx + 1], src[0][ch][2 * y + 1][2 * xx],
                             src[0][ch][2 * y + 1][2 * xx + 1]};
        for (int b = 0; b < 4; ++b) {
          double acc = 0;
          for (int k = 0; k < 4; ++k) acc += 0.5 * basis[b][k] * v[k];
          dst[0][b * c + ch][y][xx] = acc;
        }
      }
    }
  }
  return out;
}

TEST(HaarTest, RoundTripIsIdentity) {
  for (int64_t size : {2, 8, 30, 64}) {
    auto x = torch::rand({2, 3, size, size + 2}, Gen(size));
    EXPECT_LT((HaarUp(HaarDown(x)) - x).abs().max().item<float>(), 1e-6f) << size;
  }
}

TEST(HaarTest, PreservesEnergy) {
  auto x = torch::randn({1, 4, 32, 32}, Gen(3));
  EXPECT_NEAR(HaarDown(x).norm().item<double>(), x.norm().item<double>(), 1e-5 * x.norm().item<double>());
}

TEST(HaarTest, MatchesBlockMatrix) {
  auto x = torch::rand({1, 3, 16, 12}, Gen(4));
  auto expected = HaarByBlocks(x);
  EXPECT_LT((HaarDown(x).to(torch::kDouble) - expected).abs().max().item<double>(), 1e-6);
}

TEST(HaarTest, ConstantImage) {
  const float c = 0.37f;
  auto bands = HaarDown(torch::full({1, 2, 8, 8}, c));
  EXPECT_TRUE(torch::allclose(bands.slice(1, 0, 2), torch::full({1, 2, 4, 4}, 2 * c)));
  EXPECT_EQ(bands.slice(1, 2).abs().max().item<float>(), 0.0f);
}

TEST(HaarTest, ZeroInputGivesZero) {
  EXPECT_EQ(HaarUp(torch::zeros({1, 8, 4, 4})).abs().max().item<float>(), 0.0f);
}

TEST(HaarTest, ImpulseReproducesBasisVector) {
  const double basis[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  for (int band = 0; band < 4; ++band) {
    auto bands = torch::zeros({1, 4, 2, 2});
    bands[0][band][1][0] = 1.0f;
    auto out = HaarUp(bands);
    auto expected = torch::zeros({1, 1, 4, 4});
    expected[0][0][2][0] = 0.5 * basis[band][0];
    expected[0][0][2][1] = 0.5 * basis[band][1];
    expected[0][0][3][0] = 0.5 * basis[band][2];
    expected[0][0][3][1] = 0.5 * basis[band][3];
    EXPECT_TRUE(torch::allclose(out, expected)) << band;
  }
}

TEST(HaarTest, ShapeErrors) {
  EXPECT_THROW(HaarDown(torch::zeros({1, 3, 7, 8})), ShapeError);
  EXPECT_THROW(HaarUp(torch::zeros({1, 6, 4, 4})), ShapeError);
}

TEST(QuantizeTest, GridValuesUnchanged) {
  auto x = torch::full({1}, 100.0f / 255.0f);
  EXPECT_EQ(QuantizeSte(x).item<float>(), x.item<float>());
}

TEST(QuantizeTest, HalfRoundsAwayFromZero) {
  EXPECT_FLOAT_EQ(QuantizeSte(torch::full({1}, 0.5f)).item<float>(), 128.0f / 255.0f);
  EXPECT_FLOAT_EQ(QuantizeSte(torch::full({1}, 0.5f / 255.0f)).item<float>(), 1.0f / 255.0f);
}

TEST(QuantizeTest, OutputOnGridAndClose) {
  auto x = torch::rand({4096}, Gen(9)) * 1.2 - 0.1;
  auto q = QuantizeSte(x);
  auto levels = q * 255.0;
  EXPECT_LT((levels - levels.round()).abs().max().item<float>(), 1e-4f);
  EXPECT_LE((q - x.clamp(0, 1)).abs().max().item<float>(), 0.5f / 255.0f + 1e-7f);
  EXPECT_TRUE(torch::equal(QuantizeSte(q), q));
}

TEST(QuantizeTest, GradientIsIdentity) {
  auto x = torch::rand({3, 8, 8}, Gen(5)).requires_grad_(true);
  QuantizeSte(x).sum().backward();
  EXPECT_TRUE(torch::equal(x.grad(), torch::ones_like(x)));
}

TEST(CannyTest, ConstantImageHasNoEdges) {
  EXPECT_EQ(CannyEdge(torch::full({1, 3, 32, 32}, 0.4f)).sum().item<float>(), 0.0f);
}

TEST(CannyTest, OutputIsBinary) {
  auto edges = CannyEdge(RandomImage(2, 2));
  EXPECT_TRUE(((edges == 0) | (edges == 1)).all().item<bool>());
  EXPECT_EQ(edges.sizes(), (std::vector<int64_t>{2, 1, 64, 64}));
}

TEST(CannyTest, RejectsNonRgb) { EXPECT_THROW(CannyEdge(torch::zeros({1, 1, 16, 16})), ContractError); }

TEST(CannyTest, StepEdgeMatchesOpenCv) {
  const int k = 21;
  auto image = torch::zeros({1, 3, 48, 48});
  image.slice(3, k) = 0.8f;
  auto edges = CannyEdge(image)[0][0];

  cv::Mat gray(48, 48, CV_8U, cv::Scalar(0));
  gray.colRange(k, 48).setTo(cv::Scalar(std::round(0.8 * 255)));
  cv::Mat blurred, dx, dy, magnitude;
  cv::GaussianBlur(gray, blurred, cv::Size(7, 7), 1.0, 1.0, cv::BORDER_REPLICATE);
  cv::Sobel(blurred, dx, CV_32F, 1, 0);
  cv::Sobel(blurred, dy, CV_32F, 0, 1);
  cv::magnitude(dx, dy, magnitude);
  double max_mag = 0;
  cv::minMaxLoc(magnitude, nullptr, &max_mag);
  cv::Mat reference;
  cv::Canny(blurred, reference, 0.1 * max_mag, 0.2 * max_mag, 3, true);

  std::set<int> ours, theirs;
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      if (edges[y][x].item<float>() > 0) ours.insert(x);
      if (reference.at<uint8_t>(y, x) > 0) theirs.insert(x);
    }
  }
  ASSERT_FALSE(ours.empty());
  ASSERT_FALSE(theirs.empty());
  for (int x : ours) EXPECT_LE(std::abs(x - k), 1) << x;
  EXPECT_LE(std::abs(*ours.begin() - *theirs.begin()), 1);
}

TEST(PsnrTest, IdenticalIsCapped) {
  auto a = RandomImage(1);
  EXPECT_EQ(Psnr(a, a), kPsnrCap);
}

TEST(PsnrTest, UniformErrorClosedForm) {
  auto a = torch::rand({1, 3, 16, 16}, Gen(7)) * 0.5;
  EXPECT_NEAR(Psnr(a, a + 1.0 / 255.0), 20.0 * std::log10(255.0), 0.01);
  EXPECT_NEAR(Psnr(a, a + 10.0 / 255.0), 28.13, 0.01);
  EXPECT_NEAR(Psnr(a, a + 1.0 / 255.0), 48.13, 0.01);
}

TEST(PsnrTest, DecreasesWithError) {
  auto a = torch::rand({1, 3, 16, 16}, Gen(8)) * 0.5;
  double previous = kPsnrCap;
  for (int e = 1; e <= 20; ++e) {
    const double p = Psnr(a, a + e / 255.0);
    EXPECT_LT(p, previous);
    previous = p;
  }
}

TEST(PsnrTest, ShapeMismatch) { EXPECT_THROW(Psnr(torch::zeros({1, 3, 8, 8}), torch::zeros({1, 3, 8, 16})), ContractError); }

// Windowed SSIM computed window by window, no separable filtering.
double SsimByWindows(const torch::Tensor& a, const torch::Tensor& b) {
  auto x = (Luminance(a.to(torch::kDouble))[0][0] * 255.0).contiguous();
  auto y = (Luminance(b.to(torch::kDouble))[0][0] * 255.0).contiguous();
  auto xs = x.accessor<double, 2>();
  auto ys = y.accessor<double, 2>();
  double g[11], gsum = 0;
  for (int i = 0; i < 11; ++i) gsum += g[i] = std::exp(-(i - 5) * (i - 5) / (2 * 1.5 * 1.5));
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  const int64_t h = x.size(0), w = x.size(1);
  double total = 0;
  int64_t count = 0;
  for (int64_t r = 0; r + 11 <= h; ++r) {
    for (int64_t c = 0; c + 11 <= w; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < 11; ++i) {
        for (int j = 0; j < 11; ++j) {
          const double wt = g[i] * g[j] / (gsum * gsum);
          const double p = xs[r + i][c + j], q = ys[r + i][c + j];
          mx += wt * p;
          my += wt * q;
          sxx += wt * p * p;
          syy += wt * q * q;
          sxy += wt * p * q;
        }
      }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      total += ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
      ++count;
    }
  }
  return total / count;
}

TEST(SsimTest, SelfSimilarityIsOne) {
  auto a = RandomImage(11, 1, 3, 32, 32);
  EXPECT_NEAR(Ssim(a, a), 1.0, 1e-12);
}

TEST(SsimTest, Symmetric) {
  auto a = RandomImage(12, 1, 3, 32, 32);
  auto b = RandomImage(13, 1, 3, 32, 32);
  EXPECT_NEAR(Ssim(a, b), Ssim(b, a), 1e-7);
}

TEST(SsimTest, MatchesWindowedReference) {
  auto a = RandomImage(14, 1, 3, 24, 20);
  auto b = (a + 0.05 * torch::randn(a.sizes(), Gen(15))).clamp(0, 1);
  EXPECT_NEAR(Ssim(a, b), SsimByWindows(a, b), 1e-9);
}

TEST(SsimTest, MonotoneInNoise) {
  auto a = RandomImage(16, 1, 3, 32, 32);
  auto noise = torch::randn(a.sizes(), Gen(17));
  auto light = (a + 0.02 * noise).clamp(0, 1);
  auto heavy = (a + 0.2 * noise).clamp(0, 1);
  EXPECT_LT(Ssim(a, heavy), Ssim(a, light));
}

TEST(SsimTest, RejectsTinyImages) { EXPECT_THROW(Ssim(torch::zeros({1, 3, 8, 8}), torch::zeros({1, 3, 8, 8})), ContractError); }

TEST(F1Test, Conventions) {
  auto empty = torch::zeros({1, 1, 8, 8});
  auto gt = torch::zeros({1, 1, 8, 8});
  gt.slice(2, 0, 4) = 1.0f;
  EXPECT_EQ(F1Score(gt, gt), 1.0);
  EXPECT_EQ(F1Score(empty, empty), 1.0);
  EXPECT_EQ(F1Score(empty, gt), 0.0);
  EXPECT_EQ(F1Score(gt, empty), 0.0);
}

TEST(F1Test, HalfCoverageIsTwoThirds) {
  auto gt = torch::zeros({1, 1, 8, 8});
  gt.slice(2, 0, 4) = 1.0f;
  auto pred = torch::zeros_like(gt);
  pred.slice(2, 0, 2) = 1.0f;
  EXPECT_EQ(F1Score(pred, gt), 2.0 / 3.0);
}

TEST(F1Test, BoundedOnRandomMasks) {
  for (uint64_t s = 0; s < 20; ++s) {
    const double f = F1Score(testing::RandomMask(s, 16, 16), testing::RandomMask(s + 100, 16, 16));
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(F1Test, RejectsSoftMasks) {
  EXPECT_THROW(F1Score(torch::full({1, 1, 4, 4}, 0.5f), torch::zeros({1, 1, 4, 4})), ContractError);
}

TEST(ImageIoTest, PngRoundTripIsBitwise) {
  auto dir = testing::TempDir("png_roundtrip");
  auto image = RandomImage(20, 1, 3, 32, 40);
  WriteImage(dir / "a.png", image);
  EXPECT_TRUE(torch::equal(ReadImage(dir / "a.png").unsqueeze(0), image));
}

TEST(ImageIoTest, JpegBytesDecodeDeterministically) {
  auto image = RandomImage(21, 1, 3, 32, 32);
  auto bytes = EncodeJpeg(image, 50);
  EXPECT_TRUE(torch::equal(DecodeJpeg(bytes), DecodeJpeg(bytes)));
  EXPECT_EQ(bytes, EncodeJpeg(image, 50));
}

}  // namespace
}  // namespace immunet::imaging
