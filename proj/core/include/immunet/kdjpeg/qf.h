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

#ifndef IMMUNET_KDJPEG_QF_H_
#define IMMUNET_KDJPEG_QF_H_

#include <torch/torch.h>

#include <array>
#include <cstdint>

namespace immunet::kdjpeg {

// The six quality classes; 100 stands for "not compressed".
inline constexpr std::array<int, 6> kQfLabels = {10, 30, 50, 70, 90, 100};
inline constexpr int64_t kQfClassCount = 6;

class QfClass {
 public:
  // Throws ContractError unless `quality` is one of kQfLabels.
  static QfClass FromQuality(int quality);
  static QfClass FromIndex(int64_t index);
  // Closest class label, for qualities that fall between classes.
  static QfClass Nearest(int quality);

  int quality() const { return kQfLabels[static_cast<size_t>(index_)]; }
  int64_t index() const { return index_; }
  bool uncompressed() const { return quality() == 100; }

  friend bool operator==(QfClass a, QfClass b) { return a.index_ == b.index_; }

 private:
  explicit QfClass(int64_t index) : index_(index) {}
  int64_t index_;
};

// [N, 6] one-hot rows for a batch of class indices [N].
torch::Tensor OneHot(const torch::Tensor& indices);

}  // namespace immunet::kdjpeg

#endif  // IMMUNET_KDJPEG_QF_H_
