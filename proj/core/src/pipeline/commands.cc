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

#include "immunet/pipeline/commands.h"

#include <fstream>
#include <iterator>

#include <c10/util/Logging.h>

#include "immunet/attack/simulate.h"
#include "immunet/detectors/morphology.h"
#include "immunet/errors.h"
#include "immunet/iinet/iinet.h"
#include "immunet/imaging/canny.h"
#include "immunet/imaging/image_io.h"
#include "immunet/imaging/metrics.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"
#include "immunet/kdjpeg/codec.h"
#include "immunet/kdjpeg/trainer.h"
#include "immunet/pipeline/dataset.h"
#include "immunet/pipeline/models.h"
#include "immunet/pipeline/synthetic.h"

namespace immunet::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  Require(in.good(), "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ContractError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path);
  Require(out.good(), "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string FileHash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Fnv1aHex(bytes.data(), bytes.size());
}

void WriteBytes(const fs::path& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string Abs(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

PipelineArtifact LoadPipelineFrom(const fs::path& model_dir) {
  const auto path = model_dir / kPipelineFile;
  Require(fs::exists(path), "no pipeline model at " + path.string());
  auto a = LoadPipeline(path);
  for (const auto& [name, module] : a.models.Modules()) module->eval();
  return a;
}

// One attack job, as recorded in the manifest.
struct AttackRecord {
  std::string id;
  fs::path immunized, original, donor;
  attack::AttackPlan plan;
  std::string container;
};

json RunAttack(const AttackRecord& r, const fs::path& out_dir, const attack::InpaintRegistry& inpaint) {
  auto x = imaging::AsBatch(imaging::ReadImage(r.immunized));
  std::vector<torch::Tensor> donors;
  if (r.plan.tamper == attack::TamperKind::kSplicing) {
    auto donor = imaging::ReadImage(r.donor);
    if (donor.size(1) != x.size(2) || donor.size(2) != x.size(3)) donor = imaging::ResizeCenterCrop(donor, x.size(2));
    donors.push_back(donor);
  }
  kdjpeg::RealJpegSimulator codec;
  torch::NoGradGuard no_grad;
  auto outcome = attack::SimulateAttack(x, r.plan, donors, &codec, inpaint);

  const bool lossy = r.plan.post == attack::PostKind::kJpeg && r.plan.post_params.jpeg_quality < 100;
  const std::string container = lossy ? "jpg" : r.container;
  const auto attacked = out_dir / "attacked" / (r.id + "." + container);
  const auto mask = out_dir / "masks" / (r.id + ".png");
  if (lossy) {
    // The file is the codec output itself, so evaluation decodes exactly
    // what the attack produced.
    WriteBytes(attacked, imaging::EncodeJpeg(outcome.tampered[0], r.plan.post_params.jpeg_quality));
  } else {
    imaging::WriteImage(attacked, outcome.attacked[0]);
  }
  imaging::WriteBinaryMask(mask, outcome.mask[0]);
  return {{"id", r.id},
          {"immunized", Abs(r.immunized)},
          {"original", r.original.empty() ? "" : Abs(r.original)},
          {"donor", r.donor.empty() ? "" : Abs(r.donor)},
          {"plan", r.plan},
          {"crop", outcome.crop},
          {"container", container},
          {"lossless_container", r.container},
          {"attacked", Abs(attacked)},
          {"mask", Abs(mask)},
          {"tamper_rate", outcome.mask.mean().item<double>()}};
}

void PrepareAttackDirs(const fs::path& out_dir) {
  fs::create_directories(out_dir / "attacked");
  fs::create_directories(out_dir / "masks");
}

void ApplyOverrides(attack::PostParams& p, const std::map<std::string, double>& o) {
  for (const auto& [k, v] : o) {
    if (k == "awgn_sigma") p.awgn_sigma = v;
    else if (k == "blur_sigma") p.blur_sigma = v;
    else if (k == "median_kernel") p.median_kernel = static_cast<int>(v);
    else if (k == "rescale_factor") p.rescale_factor = v;
    else if (k == "jpeg_quality") p.jpeg_quality = static_cast<int>(v);
    else if (k == "crop_area") p.crop_area = v;
    else if (k == "dropout_rate") p.dropout_rate = v;
    else throw ContractError("unknown post-processing parameter " + k);
  }
}

torch::Tensor ReadMask(const fs::path& path) { return imaging::AsBatch(imaging::ReadGray(path)); }

torch::Tensor Plane(const torch::Tensor& x, const attack::CropGeometry& crop) {
  return crop.active ? attack::ExtractCrop(x, crop) : x;
}

}  // namespace

int64_t CmdImmunize(const ImmunizeOptions& o) {
  Require(o.container == "png" || o.container == "bmp", "immunize: container must be png or bmp");
  auto model = LoadPipelineFrom(o.model_dir);
  fs::create_directories(o.out_dir / "edges");
  fs::create_directories(o.out_dir / "original");
  json items = json::array();
  torch::NoGradGuard no_grad;
  for (const auto& path : ListImages(o.input_dir)) {
    torch::Tensor image;
    try {
      image = imaging::AsBatch(imaging::ResizeCenterCrop(imaging::ReadImage(path), model.resolution));
    } catch (const std::exception& e) {
      LOG(WARNING) << "skipping " << path << ": " << e.what();
      continue;
    }
    const std::string id = path.stem().string();
    auto edges = imaging::CannyEdge(image);
    auto x = imaging::Quantize8Bit(iinet::Immunize(model.models.iinet, image, edges).image);
    const auto out = o.out_dir / (id + "." + o.container);
    const auto edge_path = o.out_dir / "edges" / (id + ".png");
    const auto original = o.out_dir / "original" / (id + ".png");
    imaging::WriteImage(out, x[0]);
    imaging::WriteBinaryMask(edge_path, edges[0]);
    imaging::WriteImage(original, image[0]);
    items.push_back({{"id", id}, {"source", Abs(path)}, {"immunized", Abs(out)}, {"edges", Abs(edge_path)},
                     {"original", Abs(original)}});
  }
  WriteJson(o.out_dir / kImmunizeManifest, {{"version", 1},
                                            {"model", {{"path", Abs(o.model_dir / kPipelineFile)}, {"hash", model.hash}}},
                                            {"resolution", model.resolution},
                                            {"container", o.container},
                                            {"items", items}});
  return static_cast<int64_t>(items.size());
}

int64_t CmdAttack(const AttackOptions& o) {
  std::vector<AttackRecord> jobs;
  std::vector<fs::path> donor_pool;
  json source = nullptr;
  const auto manifest = o.immunized_dir / kImmunizeManifest;
  if (fs::exists(manifest)) {
    auto m = ReadJson(manifest);
    source = {{"manifest", Abs(manifest)}, {"hash", FileHash(manifest)}, {"model", m.value("model", json())}};
    for (const auto& item : m.at("items")) {
      AttackRecord r;
      r.id = item.at("id").get<std::string>();
      r.immunized = item.at("immunized").get<std::string>();
      r.original = item.at("original").get<std::string>();
      jobs.push_back(r);
      donor_pool.push_back(r.original);
    }
  } else {
    for (const auto& path : ListImages(o.immunized_dir)) {
      AttackRecord r;
      r.id = path.stem().string();
      r.immunized = path;
      jobs.push_back(r);
      donor_pool.push_back(path);
    }
  }
  Require(!jobs.empty(), "attack: no immunized images in " + o.immunized_dir.string());
  Require(o.spec.tamper != attack::TamperKind::kSplicing || donor_pool.size() > 1,
          "attack: splicing needs at least two images to draw donors from");
  Require(o.spec.rate > 0.0 && o.spec.rate < 1.0, "attack: tamper rate must lie in (0, 1)");

  Rng master(o.seed);
  for (size_t i = 0; i < jobs.size(); ++i) {
    Rng rng(master.Fork());
    auto& r = jobs[i];
    const auto size = imaging::ReadImage(r.immunized).size(1);
    attack::PlanSampling sampling;
    sampling.false_alarm_probability = o.spec.tamper == attack::TamperKind::kNone ? 1.0 : 0.0;
    sampling.min_rate = sampling.max_rate = o.spec.rate;
    sampling.tamper_kinds = {o.spec.tamper == attack::TamperKind::kNone ? attack::TamperKind::kSplicing : o.spec.tamper};
    r.plan = attack::SamplePlan(rng, o.spec.post, sampling, size, size);
    r.plan.tamper = o.spec.tamper;
    r.plan.inpaint_provider = o.spec.inpaint_provider;
    ApplyOverrides(r.plan.post_params, o.spec.post_overrides);
    r.plan.donor_index = 0;
    if (donor_pool.size() > 1) {
      const auto offset = rng.UniformInt(1, static_cast<int64_t>(donor_pool.size()) - 1);
      r.donor = donor_pool[(i + static_cast<size_t>(offset)) % donor_pool.size()];
    }
    r.container = o.spec.container;
    try {
      attack::ValidatePlan(r.plan);
    } catch (const ContractError& e) {
      throw ContractError(std::string("invalid attack plan: ") + e.what() +
                          " (check attack.tamper, attack.post and the attack.* parameters)");
    }
  }

  PrepareAttackDirs(o.out_dir);
  attack::InpaintRegistry inpaint;
  json items = json::array();
  for (const auto& r : jobs) items.push_back(RunAttack(r, o.out_dir, inpaint));
  WriteJson(o.out_dir / kAttackManifest, {{"version", 1},
                                          {"seed", o.seed},
                                          {"tamper", attack::ToString(o.spec.tamper)},
                                          {"post", attack::ToString(o.spec.post)},
                                          {"rate", o.spec.rate},
                                          {"source", source},
                                          {"items", items}});
  return static_cast<int64_t>(items.size());
}

int64_t CmdAttackReplay(const fs::path& manifest_path, const fs::path& out_dir) {
  auto m = ReadJson(manifest_path);
  PrepareAttackDirs(out_dir);
  attack::InpaintRegistry inpaint;
  json items = json::array();
  for (const auto& item : m.at("items")) {
    AttackRecord r;
    r.id = item.at("id").get<std::string>();
    r.immunized = item.at("immunized").get<std::string>();
    r.original = item.value("original", "");
    r.donor = item.value("donor", "");
    r.plan = item.at("plan").get<attack::AttackPlan>();
    r.container = item.value("lossless_container", "png");
    items.push_back(RunAttack(r, out_dir, inpaint));
  }
  m["items"] = items;
  m["replay_of"] = Abs(manifest_path);
  WriteJson(out_dir / kAttackManifest, m);
  return static_cast<int64_t>(items.size());
}

EvaluationReport CmdLocalizeRecover(const LocalizeRecoverOptions& o) {
  auto model = LoadPipelineFrom(o.model_dir);
  const auto params = o.mask.value_or(detectors::MaskPostprocessParams::ForResolution(model.resolution));
  params.Validate();

  struct Job {
    std::string id, attack, tamper;
    fs::path attacked, gt, immunized, original;
    attack::CropGeometry crop;
  };
  std::vector<Job> jobs;
  const auto manifest = o.attacked_dir / kAttackManifest;
  const bool has_truth = fs::exists(manifest);
  if (has_truth) {
    auto m = ReadJson(manifest);
    for (const auto& item : m.at("items")) {
      Job j;
      j.id = item.at("id").get<std::string>();
      const auto plan = item.at("plan").get<attack::AttackPlan>();
      j.attack = attack::ToString(plan.post);
      j.tamper = attack::ToString(plan.tamper);
      j.attacked = item.at("attacked").get<std::string>();
      j.gt = item.at("mask").get<std::string>();
      j.immunized = item.at("immunized").get<std::string>();
      j.original = item.value("original", "");
      j.crop = item.at("crop").get<attack::CropGeometry>();
      jobs.push_back(j);
    }
  } else {
    for (const auto& path : ListImages(o.attacked_dir)) {
      Job j;
      j.id = path.stem().string();
      j.attacked = path;
      jobs.push_back(j);
    }
  }

  for (const char* sub : {"masks", "soft", "recovered"}) fs::create_directories(o.out_dir / sub);
  json pairs = json::array();
  torch::NoGradGuard no_grad;
  for (const auto& j : jobs) {
    auto x = imaging::AsBatch(imaging::ReadImage(j.attacked));
    RequireShape(x.size(2) == model.resolution && x.size(3) == model.resolution,
                 "localize-recover: " + j.attacked.string() + " is " + std::to_string(x.size(2)) + "x" +
                     std::to_string(x.size(3)) + " but the model expects " + std::to_string(model.resolution));
    auto plane = Plane(x, j.crop);
    auto soft = model.models.detector->forward(plane);
    auto predicted = detectors::PostprocessMask(soft, params);
    auto recovered = iinet::Recover(model.models.iinet, detectors::Rectify(plane, predicted)).image;
    recovered = imaging::Quantize8Bit(recovered);

    auto mask_canvas = torch::zeros({1, 1, x.size(2), x.size(3)});
    auto soft_canvas = torch::zeros({1, 1, x.size(2), x.size(3)});
    auto rec_canvas = torch::zeros_like(x);
    if (j.crop.active) {
      auto region = [&](torch::Tensor& t) {
        return t.narrow(2, j.crop.top, j.crop.height).narrow(3, j.crop.left, j.crop.width);
      };
      region(mask_canvas).copy_(predicted);
      region(soft_canvas).copy_(soft);
      region(rec_canvas).copy_(recovered);
    } else {
      mask_canvas = predicted;
      soft_canvas = soft;
      rec_canvas = recovered;
    }
    const auto mask_path = o.out_dir / "masks" / (j.id + ".png");
    const auto rec_path = o.out_dir / "recovered" / (j.id + ".png");
    imaging::WriteBinaryMask(mask_path, mask_canvas[0]);
    imaging::WriteSoftMask(o.out_dir / "soft" / (j.id + ".png"), soft_canvas[0]);
    imaging::WriteImage(rec_path, rec_canvas[0]);
    if (has_truth) {
      PairRecord p{j.id, j.attack, j.tamper, j.original, j.immunized, j.attacked, j.gt, mask_path, rec_path, j.crop};
      pairs.push_back(p);
    }
  }
  if (!has_truth) return {};
  const auto pairs_path = o.out_dir / kPairsManifest;
  WriteJson(pairs_path, {{"version", 1}, {"model", {{"hash", model.hash}}}, {"pairs", pairs}});
  return CmdEvaluate({pairs_path, o.out_dir});
}

void to_json(json& j, const PairRecord& p) {
  j = {{"id", p.id},
       {"attack", p.attack},
       {"tamper", p.tamper},
       {"original", p.original.empty() ? "" : Abs(p.original)},
       {"immunized", Abs(p.immunized)},
       {"attacked", Abs(p.attacked)},
       {"gt_mask", Abs(p.gt_mask)},
       {"predicted_mask", Abs(p.predicted_mask)},
       {"recovered", Abs(p.recovered)},
       {"crop", p.crop}};
}

void from_json(const json& j, PairRecord& p) {
  p.id = j.at("id").get<std::string>();
  p.attack = j.value("attack", "");
  p.tamper = j.value("tamper", "");
  p.original = j.value("original", "");
  p.immunized = j.value("immunized", "");
  p.attacked = j.value("attacked", "");
  p.gt_mask = j.value("gt_mask", "");
  p.predicted_mask = j.value("predicted_mask", "");
  p.recovered = j.value("recovered", "");
  if (j.contains("crop")) p.crop = j.at("crop").get<attack::CropGeometry>();
}

EvaluationRow EvaluatePair(const PairRecord& p) {
  auto original = imaging::AsBatch(imaging::ReadImage(p.original));
  auto immunized = imaging::AsBatch(imaging::ReadImage(p.immunized));
  auto recovered = imaging::AsBatch(imaging::ReadImage(p.recovered));
  auto truth = ReadMask(p.gt_mask);
  auto predicted = ReadMask(p.predicted_mask);
  imaging::CheckSameShape(original, immunized, "EvaluatePair immunized");
  imaging::CheckSameShape(original, recovered, "EvaluatePair recovered");
  imaging::CheckSameShape(truth, predicted, "EvaluatePair masks");

  EvaluationRow r;
  r.id = p.id;
  r.attack = p.attack;
  r.tamper = p.tamper;
  r.tamper_rate = truth.mean().item<double>();
  r.psnr_immunized = imaging::Psnr(immunized, original);
  r.ssim_immunized = imaging::Ssim(immunized, original);
  auto orig_plane = Plane(original, p.crop);
  auto rec_plane = Plane(recovered, p.crop);
  r.psnr_recovered = imaging::Psnr(rec_plane, orig_plane);
  r.ssim_recovered = imaging::Ssim(rec_plane, orig_plane);
  auto pred_plane = Plane(predicted, p.crop);
  r.f1 = imaging::F1Score(pred_plane, Plane(truth, p.crop));
  r.predicted_rate = pred_plane.mean().item<double>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool tampered = truth.sum().item<double>() > 0.0;
  r.psnr_tampered_region = tampered ? imaging::PsnrMasked(recovered, original, truth) : nan;
  r.psnr_zero_fill = tampered ? imaging::PsnrMasked(torch::zeros_like(original), original, truth) : nan;
  return r;
}

EvaluationReport CmdEvaluate(const EvaluateOptions& o) {
  auto m = ReadJson(o.pairs_manifest);
  EvaluationReport report;
  for (const auto& item : m.at("pairs")) {
    PairRecord p;
    try {
      p = item.get<PairRecord>();
    } catch (const std::exception& e) {
      LOG(WARNING) << "skipping malformed pair: " << e.what();
      continue;
    }
    bool complete = true;
    for (const auto* f : {&p.original, &p.immunized, &p.attacked, &p.gt_mask, &p.predicted_mask, &p.recovered}) {
      if (f->empty() || !fs::exists(*f)) complete = false;
    }
    if (!complete) {
      LOG(WARNING) << "skipping incomplete pair " << p.id;
      continue;
    }
    try {
      report.Add(EvaluatePair(p));
    } catch (const std::exception& e) {
      LOG(WARNING) << "skipping pair " << p.id << ": " << e.what();
    }
  }
  fs::create_directories(o.out_dir);
  report.WriteCsv(o.out_dir / "report.csv");
  report.WriteSummary(o.out_dir / "summary.txt");
  report.WriteCharts(o.out_dir / "charts");
  return report;
}

json CmdTrainKdJpeg(const TrainKdJpegOptions& o) {
  const auto& c = o.config;
  std::vector<torch::Tensor> images = c.kdjpeg_data.empty() ? SyntheticCorpus(c.kdjpeg_images, c.resolution, c.seed)
                                                            : LoadTrainingImages(c.kdjpeg_data, c.resolution);
  kdjpeg::JpegCorpus corpus(images);
  torch::manual_seed(c.seed);
  kdjpeg::KdJpeg model(c.kdjpeg);
  auto train = c.kdjpeg_train;
  train.on_epoch = o.on_epoch;
  auto stats = kdjpeg::TrainKdJpeg(model, corpus, train);
  json summary = {{"images", corpus.size()},
                  {"predictor_accuracy", stats.predictor_accuracy},
                  {"teacher_loss", stats.teacher_loss},
                  {"student_loss", stats.student_loss}};
  fs::create_directories(o.model_dir);
  SaveKdJpeg(o.model_dir / kKdJpegFile, model, c.kdjpeg, c.resolution,
             {{"config_hash", c.hash},
              {"predictor_accuracy", stats.predictor_accuracy.empty() ? 0.0 : stats.predictor_accuracy.back()}});
  WriteJson(o.model_dir / "kdjpeg_stats.json", summary);
  return summary;
}

TrainSummary CmdTrain(const TrainOptions& o) {
  const auto& c = o.config;
  const auto kd_path = o.model_dir / kKdJpegFile;
  Require(fs::exists(kd_path), "train needs a trained KD-JPEG model at " + kd_path.string() + "; run train-kdjpeg first");
  auto kd = LoadKdJpeg(kd_path);
  Require(kd.resolution == c.resolution, "KD-JPEG model was trained at " + std::to_string(kd.resolution) +
                                             " but the config asks for " + std::to_string(c.resolution));
  kdjpeg::StudentJpegSimulator jpeg(kd.model);

  std::vector<torch::Tensor> images = c.train_data.empty() ? SyntheticCorpus(c.train_images, c.resolution, c.seed + 1)
                                                           : LoadTrainingImages(c.train_data, c.resolution);
  const auto ckpt_path = o.model_dir / kPipelineFile;
  TrainSummary summary;
  training::Models models;
  std::map<std::string, torch::Tensor> state;
  if (fs::exists(ckpt_path)) {
    auto a = LoadPipeline(ckpt_path);
    if (!a.trainer_state.empty()) {
      Require(a.metadata.value("config_hash", "") == c.hash,
              "cannot resume " + ckpt_path.string() + ": it was trained with config hash " +
                  a.metadata.value("config_hash", "?") + ", this config hashes to " + c.hash);
      models = a.models;
      state = std::move(a.trainer_state);
      summary.resumed = true;
    }
  }
  if (!summary.resumed) {
    torch::manual_seed(c.seed);
    models = training::MakeModels(c.models);
  }

  auto tc = c.trainer;
  tc.metrics_csv = o.model_dir / "metrics.csv";
  fs::create_directories(o.model_dir);
  int64_t resume_step = 0;
  if (summary.resumed) resume_step = state.at("trainer/step").item<int64_t>();
  if (fs::exists(tc.metrics_csv)) {
    // Keep the header and rows the checkpoint already accounts for.
    std::ifstream in(tc.metrics_csv);
    std::string header, line, kept;
    std::getline(in, header);
    while (std::getline(in, line)) {
      if (std::stoll(line.substr(0, line.find(','))) < resume_step) kept += line + "\n";
    }
    in.close();
    std::ofstream out(tc.metrics_csv, std::ios::trunc);
    if (summary.resumed) out << header << '\n' << kept;
    out.close();
    if (!summary.resumed) fs::remove(tc.metrics_csv);
  }

  training::Trainer trainer(models, &jpeg, images, tc);
  if (summary.resumed) trainer.ImportState(state);

  const auto save = [&] {
    SavePipeline(ckpt_path, trainer.models(), c.models, c.resolution,
                 {{"config_hash", c.hash},
                  {"kdjpeg_hash", kd.hash},
                  {"step", trainer.step()},
                  {"stage", trainer.stage()},
                  {"finished", trainer.Done()}},
                 trainer.ExportState());
  };
  int64_t ran = 0;
  while (!trainer.Done() && (o.max_steps < 0 || ran < o.max_steps)) {
    auto report = trainer.Step();
    ++ran;
    if (trainer.step() % c.checkpoint_every == 0) save();
    if (o.on_step && !o.on_step(report)) break;
  }
  save();
  summary.step = trainer.step();
  summary.stage = trainer.stage();
  summary.finished = trainer.Done();
  return summary;
}

}  // namespace immunet::pipeline
