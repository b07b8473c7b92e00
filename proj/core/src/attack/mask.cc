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

#include "immunet/attack/mask.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "immunet/errors.h"
#include "immunet/random.h"

namespace immunet::attack {

namespace {

void DrawStroke(cv::Mat& canvas, const MaskSpec& spec, Rng& rng) {
  const int h = canvas.rows, w = canvas.cols;
  const double side = std::min(h, w);
  const int vertices = static_cast<int>(rng.UniformInt(spec.min_vertices, spec.max_vertices));
  const int brush = std::max(1, static_cast<int>(std::lround(rng.Uniform(spec.min_brush, spec.max_brush) * side)));
  cv::Point p(static_cast<int>(rng.UniformInt(0, w - 1)), static_cast<int>(rng.UniformInt(0, h - 1)));
  double heading = rng.Uniform(0.0, 2.0 * M_PI);
  for (int v = 0; v < vertices; ++v) {
    // Random walk with a bounded turn, as in the free-form stroke recipe.
    heading += rng.Uniform(-M_PI / 2.0, M_PI / 2.0);
    const double length = rng.Uniform(0.2, 1.0) * spec.max_step * side;
    cv::Point q(std::clamp(static_cast<int>(std::lround(p.x + length * std::cos(heading))), 0, w - 1),
                std::clamp(static_cast<int>(std::lround(p.y + length * std::sin(heading))), 0, h - 1));
    cv::line(canvas, p, q, cv::Scalar(1), brush, cv::LINE_8);
    cv::circle(canvas, q, brush / 2, cv::Scalar(1), cv::FILLED, cv::LINE_8);
    p = q;
  }
}

void DrawRectangle(cv::Mat& canvas, double target_rate, Rng& rng) {
  const int h = canvas.rows, w = canvas.cols;
  const double area = rng.Uniform(0.3, 0.8) * target_rate * h * w;
  const double aspect = rng.Uniform(0.5, 2.0);
  const int rh = std::clamp(static_cast<int>(std::sqrt(area * aspect)), 1, h);
  const int rw = std::clamp(static_cast<int>(area / std::max(rh, 1)), 1, w);
  const int top = static_cast<int>(rng.UniformInt(0, h - rh));
  const int left = static_cast<int>(rng.UniformInt(0, w - rw));
  cv::rectangle(canvas, cv::Rect(left, top, rw, rh), cv::Scalar(1), cv::FILLED);
}

}  // namespace

torch::Tensor GenerateFreeformMask(int64_t height, int64_t width, const MaskSpec& spec, uint64_t seed) {
  Require(spec.target_rate >= 0.0 && spec.target_rate <= 0.5, "GenerateFreeformMask: target_rate must lie in [0, 0.5]");
  Require(height > 0 && width > 0, "GenerateFreeformMask: empty canvas");
  if (spec.target_rate == 0.0) return torch::zeros({1, 1, height, width});

  Rng rng(seed);
  const double total = static_cast<double>(height * width);
  const double lo = std::max(0.0, spec.target_rate - spec.tolerance);
  const double hi = std::min(0.5, spec.target_rate + spec.tolerance);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    cv::Mat canvas = cv::Mat::zeros(static_cast<int>(height), static_cast<int>(width), CV_8UC1);
    if (rng.Bernoulli(spec.rectangle_probability)) DrawRectangle(canvas, spec.target_rate, rng);
    double rate = cv::countNonZero(canvas) / total;
    for (int stroke = 0; stroke < spec.max_strokes && (rate < lo || rate == 0.0); ++stroke) {
      DrawStroke(canvas, spec, rng);
      rate = cv::countNonZero(canvas) / total;
    }
    if (rate >= lo && rate <= hi && rate > 0.0) {
      auto t = torch::from_blob(canvas.data, {1, 1, height, width}, torch::kUInt8).clone();
      return t.to(torch::kFloat);
    }
  }
  throw std::runtime_error("GenerateFreeformMask: target rate " + std::to_string(spec.target_rate) +
                           " unreachable after " + std::to_string(spec.max_attempts) + " attempts");
}

}  // namespace immunet::attack
