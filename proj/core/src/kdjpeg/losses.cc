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

#include "immunet/kdjpeg/losses.h"

#include "immunet/errors.h"

namespace immunet::kdjpeg {

torch::Tensor CrossEntropy(const torch::Tensor& probabilities, const torch::Tensor& target) {
  Require(probabilities.dim() == 2 && target.dim() == 1 && probabilities.size(0) == target.size(0),
          "CrossEntropy: expects [N, K] probabilities and [N] targets");
  auto picked = probabilities.gather(1, target.to(torch::kLong).unsqueeze(1)).squeeze(1);
  // In float32 1 - 1e-6 rounds down far enough to double the floor's loss.
  auto clamped = picked.to(torch::kDouble).clamp(kProbabilityFloor, 1.0 - kProbabilityFloor);
  return -torch::log(clamped).mean().to(probabilities.scalar_type());
}

torch::Tensor L1(const torch::Tensor& a, const torch::Tensor& b) { return (a - b).abs().mean(); }

torch::Tensor QfLoss(const torch::Tensor& real_probabilities, const torch::Tensor& target) {
  return CrossEntropy(real_probabilities, target);
}

torch::Tensor TeacherLoss(const torch::Tensor& teacher_image, const torch::Tensor& real_jpeg,
                          const torch::Tensor& teacher_probabilities, const torch::Tensor& target, double epsilon) {
  return L1(teacher_image, real_jpeg) + epsilon * CrossEntropy(teacher_probabilities, target);
}

torch::Tensor StudentLoss(const torch::Tensor& student_image, const torch::Tensor& real_jpeg,
                          const torch::Tensor& student_probabilities, const torch::Tensor& target,
                          const std::array<torch::Tensor, 3>& student_features,
                          const std::array<torch::Tensor, 3>& teacher_features, double epsilon) {
  auto loss = L1(student_image, real_jpeg) + epsilon * CrossEntropy(student_probabilities, target);
  for (size_t i = 0; i < 3; ++i) loss = loss + L1(student_features[i], teacher_features[i]);
  return loss;
}

}  // namespace immunet::kdjpeg
