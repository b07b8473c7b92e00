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

#ifndef IMMUNET_PIPELINE_DATASET_H_
#define IMMUNET_PIPELINE_DATASET_H_

#include <torch/torch.h>

#include <filesystem>
#include <vector>

namespace immunet::pipeline {

struct ImageRecord {
  std::filesystem::path path;
  torch::Tensor image;  // [3, R, R]
};

// Image files directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> ListImages(const std::filesystem::path& dir);

// Reads every image of `dir`, resizing the shorter side to `resolution` and
// center-cropping. Unreadable files are skipped with a warning.
std::vector<ImageRecord> LoadImageDirectory(const std::filesystem::path& dir, int64_t resolution);

// Same pixels as LoadImageDirectory, memoized under CacheDir() by a key over
// file names, sizes, modification times and the resolution.
std::vector<torch::Tensor> LoadTrainingImages(const std::filesystem::path& dir, int64_t resolution);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_DATASET_H_
