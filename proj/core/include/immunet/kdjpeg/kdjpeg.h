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

#ifndef IMMUNET_KDJPEG_KDJPEG_H_
#define IMMUNET_KDJPEG_KDJPEG_H_

#include <torch/torch.h>

#include <optional>

#include "immunet/attack/postprocess.h"
#include "immunet/kdjpeg/generator.h"
#include "immunet/kdjpeg/predictor.h"
#include "immunet/kdjpeg/qf.h"
#include "immunet/random.h"

namespace immunet::kdjpeg {

struct KdJpegOptions {
  nn::UNetOptions generator{3, 32, 4};
  QfPredictorOptions predictor;
  int64_t modulator_hidden = 64;
};

// Inputs are wrapped so the student can only ever be handed plain images and
// the teacher only real-codec output.
struct PlainImage {
  torch::Tensor pixels;
};
struct CompressedImage {
  torch::Tensor pixels;
};

// AWGN applied to the student's input: sigma ~ U[0, max_sigma] with
// probability `probability`.
struct StudentNoise {
  double max_sigma = 5.0 / 255.0;
  double probability = 0.5;
};

class KdJpegImpl : public torch::nn::Module {
 public:
  explicit KdJpegImpl(const KdJpegOptions& options = {});

  GeneratorOutput SimulateStudent(const PlainImage& image, const torch::Tensor& qf_index,
                                  const std::optional<StudentNoise>& noise = std::nullopt, Rng* rng = nullptr);
  GeneratorOutput SimulateTeacher(const CompressedImage& image, const torch::Tensor& qf_index);

  const KdJpegOptions& options() const { return options_; }

  QfPredictor predictor{nullptr};
  JpegGenerator student{nullptr};
  JpegGenerator teacher{nullptr};

 private:
  KdJpegOptions options_;
};
TORCH_MODULE(KdJpeg);

// [N] tensor of class indices, all equal to `qf`.
torch::Tensor QfIndexBatch(QfClass qf, int64_t n);

// Pipeline-time JPEG layer backed by the trained student. Qualities outside
// the class set snap to the nearest class; 100 passes straight through.
class StudentJpegSimulator : public attack::JpegSimulator {
 public:
  explicit StudentJpegSimulator(KdJpeg model);
  torch::Tensor Compress(const torch::Tensor& image, int quality) override;

 private:
  KdJpeg model_;
};

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_KDJPEG_H_
