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

#ifndef IMMUNET_PIPELINE_REPORT_H_
#define IMMUNET_PIPELINE_REPORT_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace immunet::pipeline {

// Metrics of one evaluated image. NaN marks a value that does not apply,
// e.g. tampered-region PSNR on an untampered image.
struct EvaluationRow {
  std::string id;
  std::string attack;
  std::string tamper;
  double tamper_rate = 0.0;          // mean of the ground-truth mask
  double psnr_immunized = 0.0;       // X vs I
  double ssim_immunized = 0.0;
  double psnr_recovered = 0.0;       // I^ vs I inside the evaluated area
  double ssim_recovered = 0.0;
  double f1 = 0.0;                   // M^ vs M
  double predicted_rate = 0.0;       // mean of M^
  double psnr_tampered_region = 0.0; // I^ vs I on M
  double psnr_zero_fill = 0.0;       // zero-filled rectified image vs I on M
};

inline constexpr int kMetricCount = 9;
// Numeric columns in CSV order, tamper_rate first.
const std::array<const char*, kMetricCount>& MetricNames();
std::array<double, kMetricCount> MetricValues(const EvaluationRow& row);

struct Aggregate {
  int64_t count = 0;
  // Mean over rows where the metric is not NaN; NaN when no row has it.
  std::array<double, kMetricCount> mean{};
};

// Tamper-rate buckets [0, 0.1], (0.1, 0.2], (0.2, 0.3], (0.3, 0.5], and
// (0.5, 1] for anything larger.
std::string TamperRateBucket(double rate);

class EvaluationReport {
 public:
  void Add(EvaluationRow row) { rows_.push_back(std::move(row)); }
  const std::vector<EvaluationRow>& rows() const { return rows_; }

  Aggregate Overall() const;
  std::map<std::string, Aggregate> ByAttack() const;
  std::map<std::string, Aggregate> ByBucket() const;

  // Per-image rows.
  void WriteCsv(const std::filesystem::path& path) const;
  // Aggregate tables per attack and per tamper-rate bucket.
  void WriteSummary(const std::filesystem::path& path) const;
  // One bar chart PNG per headline metric (F1, recovery PSNR, recovery SSIM)
  // over the attack kinds. Returns the written files.
  std::vector<std::filesystem::path> WriteCharts(const std::filesystem::path& dir) const;

 private:
  std::vector<EvaluationRow> rows_;
};

Aggregate AggregateRows(const std::vector<const EvaluationRow*>& rows);

}  // namespace immunet::pipeline

#endif  // IMMUNET_PIPELINE_REPORT_H_
