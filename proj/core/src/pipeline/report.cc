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

#include "immunet/pipeline/report.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "immunet/errors.h"

namespace immunet::pipeline {

const std::array<const char*, kMetricCount>& MetricNames() {
  static const std::array<const char*, kMetricCount> names = {
      "tamper_rate", "psnr_immunized", "ssim_immunized", "psnr_recovered", "ssim_recovered",
      "f1",          "predicted_rate", "psnr_tampered_region", "psnr_zero_fill"};
  return names;
}

std::array<double, kMetricCount> MetricValues(const EvaluationRow& r) {
  return {r.tamper_rate, r.psnr_immunized, r.ssim_immunized, r.psnr_recovered,      r.ssim_recovered,
          r.f1,          r.predicted_rate, r.psnr_tampered_region, r.psnr_zero_fill};
}

std::string TamperRateBucket(double rate) {
  if (rate <= 0.1) return "[0,0.1]";
  if (rate <= 0.2) return "(0.1,0.2]";
  if (rate <= 0.3) return "(0.2,0.3]";
  if (rate <= 0.5) return "(0.3,0.5]";
  return "(0.5,1]";
}

Aggregate AggregateRows(const std::vector<const EvaluationRow*>& rows) {
  Aggregate a;
  a.count = static_cast<int64_t>(rows.size());
  std::array<double, kMetricCount> sum{};
  std::array<int64_t, kMetricCount> n{};
  for (const auto* r : rows) {
    const auto v = MetricValues(*r);
    for (int k = 0; k < kMetricCount; ++k) {
      if (std::isnan(v[k])) continue;
      sum[k] += v[k];
      ++n[k];
    }
  }
  for (int k = 0; k < kMetricCount; ++k)
    a.mean[k] = n[k] > 0 ? sum[k] / static_cast<double>(n[k]) : std::numeric_limits<double>::quiet_NaN();
  return a;
}

Aggregate EvaluationReport::Overall() const {
  std::vector<const EvaluationRow*> all;
  for (const auto& r : rows_) all.push_back(&r);
  return AggregateRows(all);
}

std::map<std::string, Aggregate> EvaluationReport::ByAttack() const {
  std::map<std::string, std::vector<const EvaluationRow*>> groups;
  for (const auto& r : rows_) groups[r.attack].push_back(&r);
  std::map<std::string, Aggregate> out;
  for (const auto& [k, v] : groups) out[k] = AggregateRows(v);
  return out;
}

std::map<std::string, Aggregate> EvaluationReport::ByBucket() const {
  std::map<std::string, std::vector<const EvaluationRow*>> groups;
  for (const auto& r : rows_) groups[TamperRateBucket(r.tamper_rate)].push_back(&r);
  std::map<std::string, Aggregate> out;
  for (const auto& [k, v] : groups) out[k] = AggregateRows(v);
  return out;
}

void EvaluationReport::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  Require(out.good(), "cannot write " + path.string());
  out << "id,attack,tamper";
  for (const auto* n : MetricNames()) out << ',' << n;
  out << '\n' << std::setprecision(10);
  for (const auto& r : rows_) {
    out << r.id << ',' << r.attack << ',' << r.tamper;
    for (double v : MetricValues(r)) out << ',' << v;
    out << '\n';
  }
}

namespace {

void WriteTable(std::ostream& out, const std::string& title, const std::map<std::string, Aggregate>& groups) {
  out << title << '\n';
  out << std::left << std::setw(16) << "group" << std::right << std::setw(6) << "n";
  for (const char* h : {"PSNR(X)", "SSIM(X)", "PSNR(I^)", "SSIM(I^)", "F1"}) out << std::setw(10) << h;
  out << '\n';
  for (const auto& [name, a] : groups) {
    out << std::left << std::setw(16) << name << std::right << std::setw(6) << a.count << std::fixed;
    for (int k : {1, 2, 3, 4, 5}) out << std::setw(10) << std::setprecision(k == 1 || k == 3 ? 2 : 4) << a.mean[k];
    out << '\n';
    out.unsetf(std::ios::fixed);
  }
  out << '\n';
}

}  // namespace

void EvaluationReport::WriteSummary(const std::filesystem::path& path) const {
  std::ofstream out(path);
  Require(out.good(), "cannot write " + path.string());
  WriteTable(out, "Overall", {{"all", Overall()}});
  WriteTable(out, "Per attack", ByAttack());
  WriteTable(out, "Per tamper rate", ByBucket());
}

std::vector<std::filesystem::path> EvaluationReport::WriteCharts(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto groups = ByAttack();
  std::vector<std::filesystem::path> written;
  const std::array<std::pair<int, double>, 3> metrics = {{{5, 1.0}, {3, 50.0}, {4, 1.0}}};
  for (const auto& [k, scale] : metrics) {
    const int bar = 60, gap = 20, height = 300, margin = 40;
    const int width = margin * 2 + static_cast<int>(groups.size()) * (bar + gap);
    cv::Mat img(height + 2 * margin, std::max(width, 200), CV_8UC3, cv::Scalar(255, 255, 255));
    cv::putText(img, MetricNames()[k], {margin, margin / 2 + 8}, cv::FONT_HERSHEY_SIMPLEX, 0.5, {0, 0, 0}, 1);
    int x = margin;
    for (const auto& [name, a] : groups) {
      const double v = std::isnan(a.mean[k]) ? 0.0 : std::clamp(a.mean[k] / scale, 0.0, 1.0);
      const int top = margin + height - static_cast<int>(v * height);
      cv::rectangle(img, {x, top}, {x + bar, margin + height}, {180, 120, 40}, cv::FILLED);
      cv::putText(img, name.substr(0, 9), {x, margin + height + 15}, cv::FONT_HERSHEY_SIMPLEX, 0.35, {0, 0, 0}, 1);
      char label[32];
      std::snprintf(label, sizeof(label), "%.3g", a.mean[k]);
      cv::putText(img, label, {x, top - 4}, cv::FONT_HERSHEY_SIMPLEX, 0.35, {0, 0, 0}, 1);
      x += bar + gap;
    }
    auto path = dir / (std::string(MetricNames()[k]) + "_by_attack.png");
    cv::imwrite(path.string(), img);
    written.push_back(path);
  }
  return written;
}

}  // namespace immunet::pipeline
