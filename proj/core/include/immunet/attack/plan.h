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

#ifndef IMMUNET_ATTACK_PLAN_H_
#define IMMUNET_ATTACK_PLAN_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "immunet/random.h"

namespace immunet::attack {

enum class TamperKind { kNone, kCopyMove, kSplicing, kInpainting };

enum class PostKind { kIdentity, kAwgn, kGaussianBlur, kMedianBlur, kRescale, kJpeg, kCrop, kDropout };

std::string ToString(TamperKind kind);
std::string ToString(PostKind kind);
// Throw ContractError on unknown names.
TamperKind ParseTamperKind(const std::string& name);
PostKind ParsePostKind(const std::string& name);

// The six post-processings every training batch is expanded over.
const std::vector<PostKind>& DefaultTrainingAttacks();

// Free-form brush-stroke mask parameters. Brush widths and stroke lengths
// are fractions of the image side so one spec serves every resolution.
struct MaskSpec {
  double target_rate = 0.2;
  double tolerance = 0.05;
  int max_strokes = 12;
  int min_vertices = 4;
  int max_vertices = 10;
  double min_brush = 1.0 / 24.0;
  double max_brush = 1.0 / 10.0;
  double max_step = 1.0 / 5.0;
  // Probability that an attempt also stamps one axis-aligned rectangle.
  double rectangle_probability = 0.3;
  int max_attempts = 20;
};

struct CropGeometry {
  bool active = false;
  int64_t top = 0, left = 0, height = 0, width = 0;
};

struct PostParams {
  double awgn_sigma = 0.0;       // [0, 10/255]
  double blur_sigma = 1.0;       // [0.5, 2]
  int median_kernel = 3;         // odd
  double rescale_factor = 1.0;   // {0.5, 0.7, 1.5} in training
  int jpeg_quality = 90;         // {10, 30, 50, 70, 90} in training
  double crop_area = 1.0;        // retained area fraction, >= 0.5
  double dropout_rate = 0.0;     // <= 0.1
  uint64_t seed = 0;             // noise, crop placement and dropout pattern
};

struct AttackPlan {
  TamperKind tamper = TamperKind::kNone;
  int64_t shift_dy = 0, shift_dx = 0;  // copy-move
  int64_t donor_index = 0;             // splicing
  std::string inpaint_provider = "diffusion";
  MaskSpec mask;
  PostKind post = PostKind::kIdentity;
  PostParams post_params;
  uint64_t seed = 0;  // mask generation
};

struct PlanSampling {
  double false_alarm_probability = 0.1;
  double min_rate = 0.05;
  double max_rate = 0.45;
  std::vector<TamperKind> tamper_kinds = {TamperKind::kCopyMove, TamperKind::kSplicing, TamperKind::kInpainting};
  int64_t donor_count = 1;
};

// Draws the parameters of one post-processing kind from its training range.
PostParams SamplePostParams(PostKind kind, Rng& rng);

// Draws a complete plan: tamper kind (none with the false-alarm probability,
// otherwise uniform over tamper_kinds), mask rate, shift, donor and
// post-processing parameters. Height/width bound the copy-move shift.
AttackPlan SamplePlan(Rng& rng, PostKind post, const PlanSampling& sampling, int64_t height, int64_t width);

// Validates parameter ranges; throws ContractError.
void ValidatePlan(const AttackPlan& plan);

void to_json(nlohmann::json& j, const MaskSpec& m);
void from_json(const nlohmann::json& j, MaskSpec& m);
void to_json(nlohmann::json& j, const PostParams& p);
void from_json(const nlohmann::json& j, PostParams& p);
void to_json(nlohmann::json& j, const AttackPlan& p);
void from_json(const nlohmann::json& j, AttackPlan& p);
void to_json(nlohmann::json& j, const CropGeometry& c);
void from_json(const nlohmann::json& j, CropGeometry& c);

}  // namespace immunet::attack

#endif  // IMMUNET_ATTACK_PLAN_H_
