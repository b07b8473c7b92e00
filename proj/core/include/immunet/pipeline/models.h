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

#ifndef IMMUNET_PIPELINE_MODELS_H_
#define IMMUNET_PIPELINE_MODELS_H_

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "immunet/kdjpeg/kdjpeg.h"
#include "immunet/pipeline/checkpoint.h"
#include "immunet/training/trainer.h"

namespace immunet::pipeline {

inline constexpr const char* kKdJpegFile = "kdjpeg.ckpt";
inline constexpr const char* kPipelineFile = "pipeline.ckpt";

nlohmann::json ToJson(const training::ModelOptions& options);
training::ModelOptions ModelOptionsFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const kdjpeg::KdJpegOptions& options);
kdjpeg::KdJpegOptions KdJpegOptionsFromJson(const nlohmann::json& j);

struct KdJpegArtifact {
  kdjpeg::KdJpeg model{nullptr};
  kdjpeg::KdJpegOptions options;
  int64_t resolution = 0;
  std::string hash;
  nlohmann::json metadata;
};

// `metadata` gains kind, resolution and options before writing.
std::string SaveKdJpeg(const std::filesystem::path& path, const kdjpeg::KdJpeg& model,
                       const kdjpeg::KdJpegOptions& options, int64_t resolution, nlohmann::json metadata = {});
// The returned model is in eval mode with gradients disabled on every
// parameter.
KdJpegArtifact LoadKdJpeg(const std::filesystem::path& path);

struct PipelineArtifact {
  training::Models models;
  training::ModelOptions options;
  int64_t resolution = 0;
  std::string hash;
  nlohmann::json metadata;
  // Optimizer and schedule state, when the checkpoint was written mid-run.
  std::map<std::string, torch::Tensor> trainer_state;
};

std::string SavePipeline(const std::filesystem::path& path, const training::Models& models,
                         const training::ModelOptions& options, int64_t resolution, nlohmann::json metadata = {},
                         const std::map<std::string, torch::Tensor>& trainer_state = {});
PipelineArtifact LoadPipeline(const std::filesystem::path& path);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_MODELS_H_
