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

#ifndef IMMUNET_KDJPEG_LOSSES_H_
#define IMMUNET_KDJPEG_LOSSES_H_

#include <torch/torch.h>

#include <array>

namespace immunet::kdjpeg {

inline constexpr double kProbabilityFloor = 1e-6;

// Mean cross-entropy of probability rows [N, K] against class indices [N];
// probabilities are clamped to [1e-6, 1 - 1e-6] before the log.
torch::Tensor CrossEntropy(const torch::Tensor& probabilities, const torch::Tensor& target);

torch::Tensor L1(const torch::Tensor& a, const torch::Tensor& b);

struct KdLosses {
  torch::Tensor qf;       // CE(Q_o, Q_r) on real JPEG images
  torch::Tensor teacher;  // l1(I'_jpg, I_jpg) + eps * CE
  torch::Tensor student;  // l1(I^_jpg, I_jpg) + eps * CE + sum_i l1(phi_stu_i, phi_tea_i)
};

torch::Tensor QfLoss(const torch::Tensor& real_probabilities, const torch::Tensor& target);
torch::Tensor TeacherLoss(const torch::Tensor& teacher_image, const torch::Tensor& real_jpeg,
                          const torch::Tensor& teacher_probabilities, const torch::Tensor& target, double epsilon);
torch::Tensor StudentLoss(const torch::Tensor& student_image, const torch::Tensor& real_jpeg,
                          const torch::Tensor& student_probabilities, const torch::Tensor& target,
                          const std::array<torch::Tensor, 3>& student_features,
                          const std::array<torch::Tensor, 3>& teacher_features, double epsilon);

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_LOSSES_H_
