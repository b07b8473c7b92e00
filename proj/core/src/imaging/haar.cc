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

#include "immunet/imaging/haar.h"

#include "immunet/errors.h"
#include "immunet/imaging/tensor_checks.h"

namespace immunet::imaging {

torch::Tensor HaarDown(const torch::Tensor& x) {
  CheckBatch(x, "HaarDown");
  const int64_t n = x.size(0), c = x.size(1), h = x.size(2), w = x.size(3);
  RequireShape(h % 2 == 0 && w % 2 == 0, "HaarDown: H and W must be even");
  auto blocks = x.reshape({n, c, h / 2, 2, w / 2, 2});
  using torch::indexing::Slice;
  auto p = blocks.select(5, 0).select(3, 0);
  auto q = blocks.select(5, 1).select(3, 0);
  auto r = blocks.select(5, 0).select(3, 1);
  auto s = blocks.select(5, 1).select(3, 1);
  auto ll = (p + q + r + s) * 0.5;
  auto lh = (p + q - r - s) * 0.5;
  auto hl = (p - q + r - s) * 0.5;
  auto hh = (p - q - r + s) * 0.5;
  return torch::stack({ll, lh, hl, hh}, 1).reshape({n, 4 * c, h / 2, w / 2});
}

torch::Tensor HaarUp(const torch::Tensor& x) {
  CheckBatch(x, "HaarUp");
  const int64_t n = x.size(0), c4 = x.size(1), h = x.size(2), w = x.size(3);
  RequireShape(c4 % 4 == 0, "HaarUp: channel count must be divisible by 4");
  const int64_t c = c4 / 4;
  auto bands = x.reshape({n, 4, c, h, w});
  auto ll = bands.select(1, 0);
  auto lh = bands.select(1, 1);
  auto hl = bands.select(1, 2);
  auto hh = bands.select(1, 3);
  auto p = (ll + lh + hl + hh) * 0.5;
  auto q = (ll + lh - hl - hh) * 0.5;
  auto r = (ll - lh + hl - hh) * 0.5;
  auto s = (ll - lh - hl + hh) * 0.5;
  // [n, c, h, 2(row), w, 2(col)]
  auto top = torch::stack({p, q}, -1);
  auto bottom = torch::stack({r, s}, -1);
  return torch::stack({top, bottom}, 3).reshape({n, c, 2 * h, 2 * w});
}

}  // namespace immunet::imaging
