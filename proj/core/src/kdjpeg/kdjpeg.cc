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

#include "immunet/kdjpeg/kdjpeg.h"

#include "immunet/errors.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::kdjpeg {

KdJpegImpl::KdJpegImpl(const KdJpegOptions& options) : options_(options) {
  predictor = register_module("predictor", QfPredictor(options.predictor));
  student = register_module("student", JpegGenerator(options.generator));
  teacher = register_module("teacher", JpegGenerator(options.generator));
}

GeneratorOutput KdJpegImpl::SimulateStudent(const PlainImage& image, const torch::Tensor& qf_index,
                                            const std::optional<StudentNoise>& noise, Rng* rng) {
  auto x = imaging::AsBatch(image.pixels);
  imaging::CheckChannels(x, 3, "SimulateStudent");
  if (noise && rng != nullptr) {
    std::vector<torch::Tensor> noisy;
    for (int64_t i = 0; i < x.size(0); ++i) {
      auto item = x[i];
      if (rng->Bernoulli(noise->probability)) {
        const double sigma = rng->Uniform(0.0, noise->max_sigma);
        item = item + sigma * torch::randn(item.sizes(),
                                           torch::make_generator<at::CPUGeneratorImpl>(rng->NextU64()), item.options());
      }
      noisy.push_back(item);
    }
    x = torch::stack(noisy);
  }
  return student->forward(x, qf_index);
}

GeneratorOutput KdJpegImpl::SimulateTeacher(const CompressedImage& image, const torch::Tensor& qf_index) {
  auto x = imaging::AsBatch(image.pixels);
  imaging::CheckChannels(x, 3, "SimulateTeacher");
  return teacher->forward(x, qf_index);
}

torch::Tensor QfIndexBatch(QfClass qf, int64_t n) { return torch::full({n}, qf.index(), torch::kLong); }

StudentJpegSimulator::StudentJpegSimulator(KdJpeg model) : model_(std::move(model)) {}

torch::Tensor StudentJpegSimulator::Compress(const torch::Tensor& image, int quality) {
  const auto qf = QfClass::Nearest(quality);
  if (qf.uncompressed()) return image;
  auto x = imaging::AsBatch(image);
  return model_->SimulateStudent(PlainImage{x}, QfIndexBatch(qf, x.size(0))).image;
}

}  // namespace immunet::kdjpeg
