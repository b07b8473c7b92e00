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

#ifndef IMMUNET_PIPELINE_COMMANDS_H_
#define IMMUNET_PIPELINE_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "immunet/attack/plan.h"
#include "immunet/pipeline/config.h"
#include "immunet/pipeline/report.h"

namespace immunet::pipeline {

// Manifest file names written next to each command's outputs.
inline constexpr const char* kImmunizeManifest = "immunize.json";
inline constexpr const char* kAttackManifest = "attack.json";
inline constexpr const char* kPairsManifest = "pairs.json";

struct ImmunizeOptions {
  std::filesystem::path input_dir;
  std::filesystem::path model_dir;
  std::filesystem::path out_dir;
  std::string container = "png";  // or "bmp"
};

// Writes <out>/<id>.<container> (X), <out>/edges/<id>.png (E, 1-bit),
// <out>/original/<id>.png (I at model resolution) and the manifest.
// Returns the number of images written.
int64_t CmdImmunize(const ImmunizeOptions& options);

struct AttackOptions {
  std::filesystem::path immunized_dir;
  std::filesystem::path out_dir;
  AttackSpec spec;
  uint64_t seed = 1;
};

// Attacks every immunized image with one plan per image drawn from
// (spec, seed, index). Writes attacked/<id>.<png|bmp|jpg>, masks/<id>.png
// and the attack manifest. JPEG attacks go through the real codec.
int64_t CmdAttack(const AttackOptions& options);

// Re-executes the plans recorded in an attack manifest into `out_dir`.
int64_t CmdAttackReplay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

struct LocalizeRecoverOptions {
  std::filesystem::path attacked_dir;
  std::filesystem::path model_dir;
  std::filesystem::path out_dir;
  // Empty: the resolution-scaled defaults.
  std::optional<detectors::MaskPostprocessParams> mask;
};

// Writes masks/<id>.png (M^), soft/<id>.png, recovered/<id>.png and, when
// the attack manifest provides ground truth, the pairs manifest plus the
// evaluation report files. Returns the report (empty without ground truth).
EvaluationReport CmdLocalizeRecover(const LocalizeRecoverOptions& options);

struct EvaluateOptions {
  std::filesystem::path pairs_manifest;
  std::filesystem::path out_dir;
};

// Recomputes every metric from the files named in the pairs manifest and
// writes report.csv, summary.txt and charts/*.png. Incomplete pairs are
// skipped with a warning.
EvaluationReport CmdEvaluate(const EvaluateOptions& options);

struct TrainKdJpegOptions {
  PipelineConfig config;
  std::filesystem::path model_dir;
  std::function<void(const std::string&, int64_t, double)> on_epoch;
};

// Trains KD-JPEG on kdjpeg.data (or a synthetic corpus) and writes
// <model_dir>/kdjpeg.ckpt. Returns the training statistics as JSON.
nlohmann::json CmdTrainKdJpeg(const TrainKdJpegOptions& options);

struct TrainOptions {
  PipelineConfig config;
  std::filesystem::path model_dir;
  // Stop after this many steps in this invocation (-1: run to the end).
  // The checkpoint written on exit allows resuming.
  int64_t max_steps = -1;
  std::function<bool(const training::StepReport&)> on_step;
};

struct TrainSummary {
  int64_t step = 0;
  int stage = 1;
  bool finished = false;
  bool resumed = false;
};

// Two-stage training. Needs <model_dir>/kdjpeg.ckpt; resumes from
// <model_dir>/pipeline.ckpt when it holds trainer state with the same
// config hash, and refuses one with a different hash.
TrainSummary CmdTrain(const TrainOptions& options);

// Evaluation row for one pair of files; exposed for tests.
struct PairRecord {
  std::string id, attack, tamper;
  std::filesystem::path original, immunized, attacked, gt_mask, predicted_mask, recovered;
  attack::CropGeometry crop;
};
void to_json(nlohmann::json& j, const PairRecord& p);
void from_json(const nlohmann::json& j, PairRecord& p);
EvaluationRow EvaluatePair(const PairRecord& pair);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_COMMANDS_H_
