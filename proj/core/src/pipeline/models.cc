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

#include "immunet/pipeline/models.h"

#include "immunet/errors.h"

namespace immunet::pipeline {

namespace {

nlohmann::json UNetJson(const nn::UNetOptions& o) { return {{"width", o.width}, {"depth", o.block_depth}}; }

nn::UNetOptions UNetFromJson(const nlohmann::json& j) {
  return {3, j.at("width").get<int64_t>(), j.at("depth").get<int64_t>()};
}

constexpr const char* kTrainerPrefix = "trainer_state/";

}  // namespace

nlohmann::json ToJson(const training::ModelOptions& o) {
  return {{"iinet",
           {{"levels", o.iinet.levels},
            {"layers_per_level", o.iinet.layers_per_level},
            {"width", o.iinet.width},
            {"clamp", o.iinet.clamp}}},
          {"detector", {{"unet", UNetJson(o.detector.unet)}, {"head_bias", o.detector.head_bias}}},
          {"d_b", {{"unet", UNetJson(o.pixel_discriminator.unet)}, {"head_bias", o.pixel_discriminator.head_bias}}},
          {"d_a", {{"width", o.patch_discriminator.width}}}};
}

training::ModelOptions ModelOptionsFromJson(const nlohmann::json& j) {
  training::ModelOptions o;
  const auto& i = j.at("iinet");
  o.iinet.levels = i.at("levels").get<int64_t>();
  o.iinet.layers_per_level = i.at("layers_per_level").get<int64_t>();
  o.iinet.width = i.at("width").get<int64_t>();
  o.iinet.clamp = i.at("clamp").get<double>();
  o.detector.unet = UNetFromJson(j.at("detector").at("unet"));
  o.detector.head_bias = j.at("detector").at("head_bias").get<double>();
  o.pixel_discriminator.unet = UNetFromJson(j.at("d_b").at("unet"));
  o.pixel_discriminator.head_bias = j.at("d_b").at("head_bias").get<double>();
  o.patch_discriminator.width = j.at("d_a").at("width").get<int64_t>();
  return o;
}

nlohmann::json ToJson(const kdjpeg::KdJpegOptions& o) {
  return {{"generator", UNetJson(o.generator)},
          {"predictor_width", o.predictor.width},
          {"modulator_hidden", o.modulator_hidden}};
}

kdjpeg::KdJpegOptions KdJpegOptionsFromJson(const nlohmann::json& j) {
  kdjpeg::KdJpegOptions o;
  o.generator = UNetFromJson(j.at("generator"));
  o.predictor.width = j.at("predictor_width").get<int64_t>();
  o.modulator_hidden = j.at("modulator_hidden").get<int64_t>();
  return o;
}

std::string SaveKdJpeg(const std::filesystem::path& path, const kdjpeg::KdJpeg& model,
                       const kdjpeg::KdJpegOptions& options, int64_t resolution, nlohmann::json metadata) {
  Checkpoint ckpt;
  ckpt.metadata = metadata.is_object() ? std::move(metadata) : nlohmann::json::object();
  ckpt.metadata["kind"] = "kdjpeg";
  ckpt.metadata["resolution"] = resolution;
  ckpt.metadata["options"] = ToJson(options);
  ExportModule(*model, "kdjpeg", ckpt.tensors);
  return SaveCheckpoint(path, ckpt);
}

KdJpegArtifact LoadKdJpeg(const std::filesystem::path& path) {
  auto ckpt = LoadCheckpoint(path);
  RequireMetadata(ckpt, "kind", "kdjpeg", path.string());
  KdJpegArtifact a;
  a.options = KdJpegOptionsFromJson(ckpt.metadata.at("options"));
  a.resolution = ckpt.metadata.at("resolution").get<int64_t>();
  a.model = kdjpeg::KdJpeg(a.options);
  ImportModule(*a.model, "kdjpeg", ckpt.tensors);
  a.model->eval();
  for (auto& p : a.model->parameters()) p.set_requires_grad(false);
  a.hash = ckpt.hash;
  a.metadata = std::move(ckpt.metadata);
  return a;
}

std::string SavePipeline(const std::filesystem::path& path, const training::Models& models,
                         const training::ModelOptions& options, int64_t resolution, nlohmann::json metadata,
                         const std::map<std::string, torch::Tensor>& trainer_state) {
  Checkpoint ckpt;
  ckpt.metadata = metadata.is_object() ? std::move(metadata) : nlohmann::json::object();
  ckpt.metadata["kind"] = "pipeline";
  ckpt.metadata["resolution"] = resolution;
  ckpt.metadata["options"] = ToJson(options);
  for (const auto& [name, module] : models.Modules()) ExportModule(*module, name, ckpt.tensors);
  for (const auto& [name, t] : trainer_state) ckpt.tensors[kTrainerPrefix + name] = t;
  return SaveCheckpoint(path, ckpt);
}

PipelineArtifact LoadPipeline(const std::filesystem::path& path) {
  auto ckpt = LoadCheckpoint(path);
  RequireMetadata(ckpt, "kind", "pipeline", path.string());
  PipelineArtifact a;
  a.options = ModelOptionsFromJson(ckpt.metadata.at("options"));
  a.resolution = ckpt.metadata.at("resolution").get<int64_t>();
  a.models = training::MakeModels(a.options);
  for (const auto& [name, module] : a.models.Modules()) ImportModule(*module, name, ckpt.tensors);
  const std::string prefix = kTrainerPrefix;
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind(prefix, 0) == 0) a.trainer_state[name.substr(prefix.size())] = t;
  }
  a.hash = ckpt.hash;
  a.metadata = std::move(ckpt.metadata);
  return a;
}

}  // namespace immunet::pipeline
