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

#include "immunet/imaging/image_io.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::imaging {

namespace {

std::string LowerExtension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// [C, H, W] float in [0,1] -> 8-bit Mat (BGR for 3 channels).
cv::Mat ToMat(const torch::Tensor& image) {
  auto x = image.dim() == 4 ? image.squeeze(0) : image;
  RequireShape(x.dim() == 3 && (x.size(0) == 1 || x.size(0) == 3), "ToMat: expected [1|3, H, W]");
  auto bytes = (Quantize8Bit(x.to(torch::kFloat)) * 255.0).round().to(torch::kUInt8).permute({1, 2, 0}).contiguous();
  const int h = static_cast<int>(x.size(1)), w = static_cast<int>(x.size(2));
  const int c = static_cast<int>(x.size(0));
  cv::Mat mat(h, w, c == 3 ? CV_8UC3 : CV_8UC1, bytes.data_ptr<uint8_t>());
  cv::Mat out = mat.clone();
  if (c == 3) cv::cvtColor(out, out, cv::COLOR_RGB2BGR);
  return out;
}

torch::Tensor FromMat(const cv::Mat& mat) {
  cv::Mat src = mat;
  if (src.depth() != CV_8U) src.convertTo(src, CV_8U);
  if (src.channels() == 3) {
    cv::cvtColor(src, src, cv::COLOR_BGR2RGB);
  } else if (src.channels() == 4) {
    cv::cvtColor(src, src, cv::COLOR_BGRA2RGB);
  }
  src = src.isContinuous() ? src : src.clone();
  auto t = torch::from_blob(src.data, {src.rows, src.cols, src.channels()}, torch::kUInt8).clone();
  return t.permute({2, 0, 1}).to(torch::kFloat).div(255.0).contiguous();
}

}  // namespace

bool IsImageFile(const std::filesystem::path& path) {
  const auto ext = LowerExtension(path);
  return ext == ".png" || ext == ".bmp" || ext == ".jpg" || ext == ".jpeg";
}

torch::Tensor ReadImage(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty()) throw std::runtime_error("cannot decode image: " + path.string());
  return FromMat(mat);
}

torch::Tensor ReadGray(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw std::runtime_error("cannot decode image: " + path.string());
  return FromMat(mat);
}

void WriteImage(const std::filesystem::path& path, const torch::Tensor& image, int jpeg_quality) {
  const auto ext = LowerExtension(path);
  std::vector<int> params;
  if (ext == ".jpg" || ext == ".jpeg") params = {cv::IMWRITE_JPEG_QUALITY, jpeg_quality};
  if (!cv::imwrite(path.string(), ToMat(image), params)) {
    throw std::runtime_error("cannot write image: " + path.string());
  }
}

void WriteBinaryMask(const std::filesystem::path& path, const torch::Tensor& mask) {
  Require(IsBinary(mask), "WriteBinaryMask: mask must be binary");
  if (!cv::imwrite(path.string(), ToMat(mask), {cv::IMWRITE_PNG_BILEVEL, 1})) {
    throw std::runtime_error("cannot write mask: " + path.string());
  }
}

void WriteSoftMask(const std::filesystem::path& path, const torch::Tensor& mask) {
  if (!cv::imwrite(path.string(), ToMat(mask))) {
    throw std::runtime_error("cannot write mask: " + path.string());
  }
}

std::vector<uint8_t> EncodeJpeg(const torch::Tensor& image, int quality) {
  Require(quality >= 1 && quality <= 100, "EncodeJpeg: quality must be in [1, 100]");
  std::vector<uint8_t> bytes;
  if (!cv::imencode(".jpg", ToMat(image), bytes, {cv::IMWRITE_JPEG_QUALITY, quality})) {
    throw std::runtime_error("JPEG encoding failed");
  }
  return bytes;
}

torch::Tensor DecodeJpeg(const std::vector<uint8_t>& bytes) {
  cv::Mat mat = cv::imdecode(bytes, cv::IMREAD_COLOR);
  if (mat.empty()) throw std::runtime_error("JPEG decoding failed");
  return FromMat(mat);
}

torch::Tensor ResizeCenterCrop(const torch::Tensor& image, int64_t size) {
  cv::Mat mat = ToMat(image);
  const double scale = static_cast<double>(size) / std::min(mat.rows, mat.cols);
  if (mat.rows != size || mat.cols != size) {
    const int h = std::max<int>(static_cast<int>(size), static_cast<int>(std::lround(mat.rows * scale)));
    const int w = std::max<int>(static_cast<int>(size), static_cast<int>(std::lround(mat.cols * scale)));
    cv::Mat resized;
    cv::resize(mat, resized, cv::Size(w, h), 0, 0, scale < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
    const int top = (h - static_cast<int>(size)) / 2, left = (w - static_cast<int>(size)) / 2;
    mat = resized(cv::Rect(left, top, static_cast<int>(size), static_cast<int>(size))).clone();
  }
  return FromMat(mat);
}

}  // namespace immunet::imaging
