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

#ifndef IMMUNET_PIPELINE_CHECKPOINT_H_
#define IMMUNET_PIPELINE_CHECKPOINT_H_

#include <torch/torch.h>

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace immunet::pipeline {

// On-disk layout, little-endian:
//   "IMNTCKPT" | u32 version | u64 json size | json metadata | u64 count |
//   count x (u32 name size | name | u8 dtype | u32 rank | i64 dims[rank] | raw data)
// dtype: 0 float32, 1 float64, 2 int64.
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, torch::Tensor> tensors;
  std::string hash;  // FNV-1a of the file bytes, filled on load and save
};

// Writes atomically (temp file + rename). Returns the content hash.
std::string SaveCheckpoint(const std::filesystem::path& path, Checkpoint& checkpoint);
// Throws ContractError for missing, truncated or foreign files.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Parameters and buffers of `module` under `prefix/`.
void ExportModule(const torch::nn::Module& module, const std::string& prefix, std::map<std::string, torch::Tensor>& out);
// Copies tensors back in place. Throws ContractError on missing names or
// shape mismatches.
void ImportModule(torch::nn::Module& module, const std::string& prefix, const std::map<std::string, torch::Tensor>& in);

// Fails unless metadata[key] equals `expected`.
void RequireMetadata(const Checkpoint& checkpoint, const std::string& key, const nlohmann::json& expected,
                     const std::string& what);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_CHECKPOINT_H_
