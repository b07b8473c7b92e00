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

#ifndef IMMUNET_IMAGING_IMAGE_IO_H_
#define IMMUNET_IMAGING_IMAGE_IO_H_

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace immunet::imaging {

// Reads PNG, BMP or JPEG into an RGB float tensor [3, H, W] in [0, 1].
// Throws std::runtime_error when the file cannot be decoded.
torch::Tensor ReadImage(const std::filesystem::path& path);

// Reads a grayscale image (masks) into [1, H, W] in [0, 1].
torch::Tensor ReadGray(const std::filesystem::path& path);

// Writes [3, H, W] (or [1, 3, H, W]); format follows the extension.
// `jpeg_quality` only matters for .jpg/.jpeg.
void WriteImage(const std::filesystem::path& path, const torch::Tensor& image, int jpeg_quality = 95);

// Binary mask [1, H, W] as a 1-bit PNG.
void WriteBinaryMask(const std::filesystem::path& path, const torch::Tensor& mask);

// Soft mask [1, H, W] as an 8-bit grayscale PNG.
void WriteSoftMask(const std::filesystem::path& path, const torch::Tensor& mask);

// In-memory baseline JPEG (4:2:0) round trip used by the reference codec.
std::vector<uint8_t> EncodeJpeg(const torch::Tensor& image, int quality);
torch::Tensor DecodeJpeg(const std::vector<uint8_t>& bytes);

// Resizes the shorter side to `size` (area interpolation) and center-crops
// to size x size.
torch::Tensor ResizeCenterCrop(const torch::Tensor& image, int64_t size);

bool IsImageFile(const std::filesystem::path& path);

}  // namespace immunet::imaging

#endif  // IMMUNET_IMAGING_IMAGE_IO_H_
