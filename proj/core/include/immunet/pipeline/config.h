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

#ifndef IMMUNET_PIPELINE_CONFIG_H_
#define IMMUNET_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "immunet/detectors/morphology.h"
#include "immunet/kdjpeg/kdjpeg.h"
#include "immunet/kdjpeg/trainer.h"
#include "immunet/training/trainer.h"

namespace immunet::pipeline {

// Flat `key = value` file. '#' starts a comment, blank lines are ignored,
// keys are dotted names, lists are comma-separated. Later assignments
// override earlier ones.
class Config {
 public:
  static Config Parse(std::istream& in, const std::string& origin = "<stream>");
  static Config Load(const std::filesystem::path& path);

  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const;

  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  std::vector<std::string> GetList(const std::string& key, const std::vector<std::string>& fallback) const;

  // Keys never read through a getter; used to reject typos.
  std::vector<std::string> UnreadKeys() const;

  // Sorted "key=value" lines and their FNV-1a hash.
  std::string Canonical() const;
  std::string Hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string* Find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> read_;
};

// Supported model resolutions. 64 is the desk-scale CPU setting.
bool IsSupportedResolution(int64_t resolution);

struct AttackSpec {
  attack::TamperKind tamper = attack::TamperKind::kSplicing;
  attack::PostKind post = attack::PostKind::kIdentity;
  double rate = 0.2;
  std::string inpaint_provider = "diffusion";
  // Explicit post-processing parameters; unset ones are drawn per image.
  std::map<std::string, double> post_overrides;
  // Lossless container for non-JPEG outputs: "png" or "bmp".
  std::string container = "png";
};

struct PipelineConfig {
  int64_t resolution = 256;
  uint64_t seed = 1;
  training::ModelOptions models;
  training::TrainerConfig trainer;
  kdjpeg::KdJpegOptions kdjpeg;
  kdjpeg::KdJpegTrainConfig kdjpeg_train;
  int64_t kdjpeg_images = 200;  // synthetic corpus size when no data dir is given
  int64_t train_images = 8;    // synthetic training set size when no data dir is given
  std::filesystem::path train_data;
  std::filesystem::path kdjpeg_data;
  int64_t checkpoint_every = 250;
  AttackSpec attack;
  // Hash of the canonical config text; checkpoints carry it.
  std::string hash;
};

// Builds a PipelineConfig from defaults plus the given entries. Throws
// ContractError for unknown keys or invalid values.
PipelineConfig FromConfig(const Config& config);

// The cache directory: $IMMUNET_CACHE_DIR, else $XDG_CACHE_HOME/immunet,
// else ~/.cache/immunet.
std::filesystem::path CacheDir();

// FNV-1a 64 as 16 hex digits.
std::string Fnv1aHex(const void* data, size_t size);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_CONFIG_H_
