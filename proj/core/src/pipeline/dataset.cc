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

#include "immunet/pipeline/dataset.h"

#include <algorithm>

#include <c10/util/Logging.h>

#include "immunet/errors.h"
#include "immunet/imaging/image_io.h"
#include "immunet/pipeline/checkpoint.h"
#include "immunet/pipeline/config.h"

namespace immunet::pipeline {

namespace fs = std::filesystem;

std::vector<fs::path> ListImages(const fs::path& dir) {
  Require(fs::is_directory(dir), "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && imaging::IsImageFile(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ImageRecord> LoadImageDirectory(const fs::path& dir, int64_t resolution) {
  std::vector<ImageRecord> out;
  for (const auto& path : ListImages(dir)) {
    try {
      out.push_back({path, imaging::ResizeCenterCrop(imaging::ReadImage(path), resolution)});
    } catch (const std::exception& e) {
      LOG(WARNING) << "skipping " << path << ": " << e.what();
    }
  }
  return out;
}

std::vector<torch::Tensor> LoadTrainingImages(const fs::path& dir, int64_t resolution) {
  std::string key = std::to_string(resolution) + "\n";
  for (const auto& path : ListImages(dir)) {
    key += path.filename().string() + " " + std::to_string(fs::file_size(path)) + " " +
           std::to_string(fs::last_write_time(path).time_since_epoch().count()) + "\n";
  }
  const auto cache = CacheDir() / "datasets" / (Fnv1aHex(key.data(), key.size()) + ".ckpt");
  if (fs::exists(cache)) {
    try {
      auto ckpt = LoadCheckpoint(cache);
      return torch::unbind(ckpt.tensors.at("images"), 0);
    } catch (const std::exception& e) {
      LOG(WARNING) << "ignoring unreadable cache " << cache << ": " << e.what();
    }
  }
  std::vector<torch::Tensor> images;
  for (auto& r : LoadImageDirectory(dir, resolution)) images.push_back(r.image);
  Require(!images.empty(), "no readable images in " + dir.string());
  try {
    Checkpoint ckpt;
    ckpt.metadata = {{"kind", "dataset"}, {"source", fs::absolute(dir).string()}, {"resolution", resolution}};
    ckpt.tensors["images"] = torch::stack(images);
    SaveCheckpoint(cache, ckpt);
  } catch (const std::exception& e) {
    LOG(WARNING) << "could not write dataset cache " << cache << ": " << e.what();
  }
  return images;
}

}  // namespace immunet::pipeline
