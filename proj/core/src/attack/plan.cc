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

#include "immunet/attack/plan.h"

#include <array>
#include <utility>

#include "immunet/errors.h"

namespace immunet::attack {

namespace {

constexpr std::array<std::pair<TamperKind, const char*>, 4> kTamperNames = {{
    {TamperKind::kNone, "none"},
    {TamperKind::kCopyMove, "copy_move"},
    {TamperKind::kSplicing, "splicing"},
    {TamperKind::kInpainting, "inpainting"},
}};

constexpr std::array<std::pair<PostKind, const char*>, 8> kPostNames = {{
    {PostKind::kIdentity, "identity"},
    {PostKind::kAwgn, "awgn"},
    {PostKind::kGaussianBlur, "gaussian_blur"},
    {PostKind::kMedianBlur, "median_blur"},
    {PostKind::kRescale, "rescale"},
    {PostKind::kJpeg, "jpeg"},
    {PostKind::kCrop, "crop"},
    {PostKind::kDropout, "dropout"},
}};

}  // namespace

std::string ToString(TamperKind kind) {
  for (const auto& [k, name] : kTamperNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string ToString(PostKind kind) {
  for (const auto& [k, name] : kPostNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

TamperKind ParseTamperKind(const std::string& name) {
  for (const auto& [k, n] : kTamperNames) {
    if (name == n) return k;
  }
  throw ContractError("unknown tamper kind '" + name + "' (none, copy_move, splicing, inpainting)");
}

PostKind ParsePostKind(const std::string& name) {
  for (const auto& [k, n] : kPostNames) {
    if (name == n) return k;
  }
  throw ContractError("unknown post-processing '" + name +
                      "' (identity, awgn, gaussian_blur, median_blur, rescale, jpeg, crop, dropout)");
}

const std::vector<PostKind>& DefaultTrainingAttacks() {
  static const std::vector<PostKind> kinds = {PostKind::kAwgn,       PostKind::kGaussianBlur, PostKind::kRescale,
                                              PostKind::kJpeg,       PostKind::kMedianBlur,   PostKind::kCrop};
  return kinds;
}

PostParams SamplePostParams(PostKind kind, Rng& rng) {
  PostParams p;
  p.seed = rng.Fork();
  switch (kind) {
    case PostKind::kAwgn:
      p.awgn_sigma = rng.Uniform(0.0, 10.0 / 255.0);
      break;
    case PostKind::kGaussianBlur:
      p.blur_sigma = rng.Uniform(0.5, 2.0);
      break;
    case PostKind::kMedianBlur:
      p.median_kernel = rng.Bernoulli(0.5) ? 3 : 5;
      break;
    case PostKind::kRescale:
      p.rescale_factor = rng.Pick(std::vector<double>{0.5, 0.7, 1.5});
      break;
    case PostKind::kJpeg:
      p.jpeg_quality = rng.Pick(std::vector<int>{10, 30, 50, 70, 90});
      break;
    case PostKind::kCrop:
      p.crop_area = rng.Uniform(0.5, 0.9);
      break;
    case PostKind::kDropout:
      p.dropout_rate = rng.Uniform(0.0, 0.1);
      break;
    case PostKind::kIdentity:
      break;
  }
  return p;
}

AttackPlan SamplePlan(Rng& rng, PostKind post, const PlanSampling& sampling, int64_t height, int64_t width) {
  AttackPlan plan;
  plan.seed = rng.Fork();
  if (sampling.tamper_kinds.empty() || rng.Bernoulli(sampling.false_alarm_probability)) {
    plan.tamper = TamperKind::kNone;
    plan.mask.target_rate = 0.0;
  } else {
    plan.tamper = rng.Pick(sampling.tamper_kinds);
    plan.mask.target_rate = rng.Uniform(sampling.min_rate, sampling.max_rate);
  }
  // Shift by at least a quarter of the side so the copy lands elsewhere.
  plan.shift_dy = rng.UniformInt(height / 4, 3 * height / 4) * (rng.Bernoulli(0.5) ? 1 : -1);
  plan.shift_dx = rng.UniformInt(width / 4, 3 * width / 4) * (rng.Bernoulli(0.5) ? 1 : -1);
  plan.donor_index = rng.UniformInt(0, std::max<int64_t>(0, sampling.donor_count - 1));
  plan.post = post;
  plan.post_params = SamplePostParams(post, rng);
  return plan;
}

void ValidatePlan(const AttackPlan& plan) {
  const auto& m = plan.mask;
  Require(m.target_rate >= 0.0 && m.target_rate <= 0.5, "mask target_rate must lie in [0, 0.5]");
  Require(m.tolerance > 0.0, "mask tolerance must be positive");
  Require(m.min_vertices >= 1 && m.max_vertices >= m.min_vertices, "invalid mask vertex range");
  Require(m.min_brush > 0.0 && m.max_brush >= m.min_brush, "invalid mask brush range");
  Require(m.max_attempts >= 1 && m.max_strokes >= 1, "mask attempts and strokes must be positive");
  const auto& p = plan.post_params;
  switch (plan.post) {
    case PostKind::kAwgn:
      Require(p.awgn_sigma >= 0.0 && p.awgn_sigma <= 10.0 / 255.0 + 1e-12, "awgn sigma must lie in [0, 10/255]");
      break;
    case PostKind::kGaussianBlur:
      Require(p.blur_sigma >= 0.5 && p.blur_sigma <= 2.0, "blur sigma must lie in [0.5, 2]");
      break;
    case PostKind::kMedianBlur:
      Require(p.median_kernel >= 1 && p.median_kernel % 2 == 1 && p.median_kernel <= 7,
              "median kernel must be odd and <= 7");
      break;
    case PostKind::kRescale:
      Require(p.rescale_factor >= 0.25 && p.rescale_factor <= 4.0, "rescale factor must lie in [0.25, 4]");
      break;
    case PostKind::kJpeg:
      Require(p.jpeg_quality >= 1 && p.jpeg_quality <= 100, "jpeg quality must lie in [1, 100]");
      break;
    case PostKind::kCrop:
      Require(p.crop_area >= 0.5 && p.crop_area <= 1.0, "crop must retain at least half the area");
      break;
    case PostKind::kDropout:
      Require(p.dropout_rate >= 0.0 && p.dropout_rate <= 0.1, "dropout rate must lie in [0, 0.1]");
      break;
    case PostKind::kIdentity:
      break;
  }
}

void to_json(nlohmann::json& j, const MaskSpec& m) {
  j = {{"target_rate", m.target_rate},     {"tolerance", m.tolerance},       {"max_strokes", m.max_strokes},
       {"min_vertices", m.min_vertices},   {"max_vertices", m.max_vertices}, {"min_brush", m.min_brush},
       {"max_brush", m.max_brush},         {"max_step", m.max_step},
       {"rectangle_probability", m.rectangle_probability}, {"max_attempts", m.max_attempts}};
}

void from_json(const nlohmann::json& j, MaskSpec& m) {
  MaskSpec d;
  m.target_rate = j.value("target_rate", d.target_rate);
  m.tolerance = j.value("tolerance", d.tolerance);
  m.max_strokes = j.value("max_strokes", d.max_strokes);
  m.min_vertices = j.value("min_vertices", d.min_vertices);
  m.max_vertices = j.value("max_vertices", d.max_vertices);
  m.min_brush = j.value("min_brush", d.min_brush);
  m.max_brush = j.value("max_brush", d.max_brush);
  m.max_step = j.value("max_step", d.max_step);
  m.rectangle_probability = j.value("rectangle_probability", d.rectangle_probability);
  m.max_attempts = j.value("max_attempts", d.max_attempts);
}

void to_json(nlohmann::json& j, const PostParams& p) {
  j = {{"awgn_sigma", p.awgn_sigma},     {"blur_sigma", p.blur_sigma},     {"median_kernel", p.median_kernel},
       {"rescale_factor", p.rescale_factor}, {"jpeg_quality", p.jpeg_quality}, {"crop_area", p.crop_area},
       {"dropout_rate", p.dropout_rate}, {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, PostParams& p) {
  PostParams d;
  p.awgn_sigma = j.value("awgn_sigma", d.awgn_sigma);
  p.blur_sigma = j.value("blur_sigma", d.blur_sigma);
  p.median_kernel = j.value("median_kernel", d.median_kernel);
  p.rescale_factor = j.value("rescale_factor", d.rescale_factor);
  p.jpeg_quality = j.value("jpeg_quality", d.jpeg_quality);
  p.crop_area = j.value("crop_area", d.crop_area);
  p.dropout_rate = j.value("dropout_rate", d.dropout_rate);
  p.seed = j.value("seed", d.seed);
}

void to_json(nlohmann::json& j, const AttackPlan& p) {
  j = {{"tamper", ToString(p.tamper)},
       {"shift", {p.shift_dy, p.shift_dx}},
       {"donor_index", p.donor_index},
       {"inpaint_provider", p.inpaint_provider},
       {"mask", p.mask},
       {"post", ToString(p.post)},
       {"post_params", p.post_params},
       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, AttackPlan& p) {
  p.tamper = ParseTamperKind(j.at("tamper").get<std::string>());
  if (j.contains("shift")) {
    p.shift_dy = j.at("shift").at(0).get<int64_t>();
    p.shift_dx = j.at("shift").at(1).get<int64_t>();
  }
  p.donor_index = j.value("donor_index", int64_t{0});
  p.inpaint_provider = j.value("inpaint_provider", std::string("diffusion"));
  if (j.contains("mask")) p.mask = j.at("mask").get<MaskSpec>();
  p.post = ParsePostKind(j.value("post", std::string("identity")));
  if (j.contains("post_params")) p.post_params = j.at("post_params").get<PostParams>();
  p.seed = j.value("seed", uint64_t{0});
}

void to_json(nlohmann::json& j, const CropGeometry& c) {
  j = {{"active", c.active}, {"top", c.top}, {"left", c.left}, {"height", c.height}, {"width", c.width}};
}

void from_json(const nlohmann::json& j, CropGeometry& c) {
  c.active = j.value("active", false);
  c.top = j.value("top", int64_t{0});
  c.left = j.value("left", int64_t{0});
  c.height = j.value("height", int64_t{0});
  c.width = j.value("width", int64_t{0});
}

}  // namespace immunet::attack
