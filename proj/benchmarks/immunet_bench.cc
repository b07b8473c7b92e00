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

#include <benchmark/benchmark.h>
#include <torch/torch.h>

#include "immunet/attack/postprocess.h"
#include "immunet/detectors/morphology.h"
#include "immunet/iinet/iinet.h"
#include "immunet/imaging/haar.h"
#include "immunet/kdjpeg/codec.h"

namespace {

torch::Tensor Images(int64_t n, int64_t channels, int64_t size) {
  return torch::rand({n, channels, size, size}, torch::make_generator<at::CPUGeneratorImpl>(1));
}

void BM_HaarRoundTrip(benchmark::State& state) {
  torch::set_num_threads(1);
  auto x = Images(4, 4, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(immunet::imaging::HaarUp(immunet::imaging::HaarDown(x)));
}
BENCHMARK(BM_HaarRoundTrip)->Arg(64)->Arg(256);

void BM_IINet(benchmark::State& state, bool inverse) {
  torch::set_num_threads(1);
  torch::NoGradGuard no_grad;
  torch::manual_seed(2);
  immunet::iinet::IINetOptions options;
  options.layers_per_level = 2;
  options.width = 16;
  immunet::iinet::IINet net(options);
  net->eval();
  auto z = Images(1, 4, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(inverse ? net->inverse(z) : net->forward(z));
}
BENCHMARK_CAPTURE(BM_IINet, forward, false)->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(BM_IINet, inverse, true)->Arg(64)->Arg(128);

void BM_PostprocessMask(benchmark::State& state) {
  torch::set_num_threads(1);
  auto soft = Images(1, 1, state.range(0));
  const auto params = immunet::detectors::MaskPostprocessParams::ForResolution(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(immunet::detectors::PostprocessMask(soft, params));
}
BENCHMARK(BM_PostprocessMask)->Arg(64)->Arg(512);

void BM_GaussianBlur(benchmark::State& state) {
  torch::set_num_threads(1);
  auto x = Images(4, 3, 64);
  for (auto _ : state) benchmark::DoNotOptimize(immunet::attack::GaussianBlur(x, 1.0));
}
BENCHMARK(BM_GaussianBlur);

void BM_RealJpeg(benchmark::State& state) {
  auto x = Images(4, 3, 64);
  for (auto _ : state) benchmark::DoNotOptimize(immunet::kdjpeg::RealJpeg(x, 50));
}
BENCHMARK(BM_RealJpeg);

}  // namespace
BENCHMARK_MAIN();
