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

#include <gtest/gtest.h>
#include <torch/torch.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "immunet/errors.h"
#include "immunet/iinet/iinet.h"
#include "immunet/imaging/canny.h"
#include "immunet/imaging/image_io.h"
#include "immunet/imaging/quantize.h"
#include "immunet/imaging/tensor_checks.h"
#include "immunet/kdjpeg/codec.h"
#include "immunet/pipeline/checkpoint.h"
#include "immunet/pipeline/commands.h"
#include "immunet/pipeline/config.h"
#include "immunet/pipeline/dataset.h"
#include "immunet/pipeline/models.h"
#include "immunet/pipeline/report.h"
#include "immunet/pipeline/synthetic.h"
#include "test_util.h"

namespace immunet::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::Gen;
using testing::TempDir;

std::string Bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Config ParseText(const std::string& text) {
  std::istringstream in(text);
  return Config::Parse(in);
}

// Small networks at the smallest supported resolution.
Config TinyConfig() {
  return ParseText(R"(
resolution = 64
seed = 3
model.iinet.width = 8
model.iinet.layers_per_level = 1
model.detector.width = 8
model.detector.depth = 1
model.d_b.width = 8
model.d_b.depth = 1
model.d_a.width = 8
train.batch_size = 2
train.lr = 1e-3
train.stage1_steps = 2
train.stage2_steps = 2
train.synthetic_images = 3
train.checkpoint_every = 1
kdjpeg.width = 8
kdjpeg.depth = 1
kdjpeg.predictor_width = 8
kdjpeg.modulator_hidden = 8
)");
}

TEST(ConfigTest, ParsesCommentsOverridesAndLists) {
  auto c = ParseText("# header\n a = 1 # trailing\n\nb = x, y ,z\na = 2\n");
  EXPECT_EQ(c.GetInt("a", 0), 2);
  EXPECT_EQ(c.GetList("b", {}), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(c.GetDouble("missing", 0.5), 0.5);
  EXPECT_THROW(ParseText("no equals sign\n"), ContractError);
  EXPECT_THROW(ParseText(" = 3\n"), ContractError);
  EXPECT_THROW(ParseText("a = 1.5\n").GetInt("a", 0), ContractError);
  EXPECT_THROW(ParseText("a = maybe\n").GetBool("a", false), ContractError);
}

TEST(ConfigTest, UnknownKeysAreRejected) {
  auto c = TinyConfig();
  EXPECT_NO_THROW(FromConfig(c));
  c.Set("train.alpah", "3");
  try {
    FromConfig(c);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("train.alpah"), std::string::npos);
  }
}

TEST(ConfigTest, InvalidValuesAreRejected) {
  for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{{"resolution", "100"},
                                                                             {"train.r_aug", "2"},
                                                                             {"train.attacks", "jpeg,sharpen"},
                                                                             {"attack.container", "gif"},
                                                                             {"mask.threshold", "1.5"}}) {
    auto c = TinyConfig();
    c.Set(k, v);
    EXPECT_THROW(FromConfig(c), ContractError) << k;
  }
}

TEST(ConfigTest, ValuesReachTheirFields) {
  auto c = TinyConfig();
  c.Set("train.alpha", "2.5");
  c.Set("train.attacks", "identity, jpeg");
  c.Set("attack.jpeg_quality", "30");
  const auto p = FromConfig(c);
  EXPECT_EQ(p.resolution, 64);
  EXPECT_EQ(p.trainer.hp.alpha, 2.5);
  EXPECT_EQ(p.trainer.hp.attacks, (std::vector<attack::PostKind>{attack::PostKind::kIdentity, attack::PostKind::kJpeg}));
  EXPECT_EQ(p.models.iinet.width, 8);
  EXPECT_EQ(p.trainer.mask_postprocess.erosion, 1);
  EXPECT_EQ(p.trainer.mask_postprocess.dilation, 2);
  EXPECT_EQ(p.attack.post_overrides.at("jpeg_quality"), 30.0);
  EXPECT_EQ(p.trainer.seed, 3u);
}

TEST(ConfigTest, HashIgnoresOrderAndCommentsButNotValues) {
  auto a = ParseText("x = 1\ny = 2\n");
  auto b = ParseText("# c\ny = 2\n\nx = 1   # again\n");
  EXPECT_EQ(a.Hash(), b.Hash());
  b.Set("y", "3");
  EXPECT_NE(a.Hash(), b.Hash());
}

TEST(ConfigTest, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1aHex("", 0), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a", 1), "af63dc4c8601ec8c");
  EXPECT_EQ(Fnv1aHex("foobar", 6), "85944171f73967e8");
}

TEST(ConfigTest, CacheDirEnvironment) {
  const char* old = std::getenv("IMMUNET_CACHE_DIR");
  const std::string saved = old ? old : "";
  setenv("IMMUNET_CACHE_DIR", "/tmp/immunet-cache-test", 1);
  EXPECT_EQ(CacheDir(), fs::path("/tmp/immunet-cache-test"));
  unsetenv("IMMUNET_CACHE_DIR");
  EXPECT_NE(CacheDir(), fs::path("/tmp/immunet-cache-test"));
  if (old) setenv("IMMUNET_CACHE_DIR", saved.c_str(), 1);
}

TEST(ConfigTest, ExampleConfigParses) {
  const fs::path example = fs::path(IMMUNET_SOURCE_DIR) / "configs" / "desk64.conf";
  ASSERT_TRUE(fs::exists(example)) << example;
  EXPECT_NO_THROW(FromConfig(Config::Load(example)));
}

TEST(CheckpointTest, RoundTrip) {
  auto dir = TempDir("ckpt");
  Checkpoint c;
  c.metadata = {{"kind", "test"}, {"n", 3}};
  c.tensors["a"] = torch::randn({2, 3, 4}, Gen(1));
  c.tensors["b"] = torch::randn({5}, Gen(2)).to(torch::kDouble);
  c.tensors["c"] = torch::tensor({7, -1, 9}, torch::kLong);
  c.tensors["scalar"] = torch::tensor(1.5f);
  const auto hash = SaveCheckpoint(dir / "x.ckpt", c);
  EXPECT_EQ(hash, c.hash);
  auto back = LoadCheckpoint(dir / "x.ckpt");
  EXPECT_EQ(back.hash, hash);
  EXPECT_EQ(back.metadata, c.metadata);
  ASSERT_EQ(back.tensors.size(), c.tensors.size());
  for (const auto& [k, t] : c.tensors) {
    EXPECT_EQ(back.tensors.at(k).scalar_type(), t.scalar_type()) << k;
    EXPECT_TRUE(torch::equal(back.tensors.at(k), t)) << k;
  }
  const auto bytes = Bytes(dir / "x.ckpt");
  EXPECT_EQ(Fnv1aHex(bytes.data(), bytes.size()), hash);
  EXPECT_NO_THROW(RequireMetadata(back, "kind", "test", "t"));
  EXPECT_THROW(RequireMetadata(back, "kind", "other", "t"), ContractError);
  EXPECT_THROW(RequireMetadata(back, "missing", 1, "t"), ContractError);
}

TEST(CheckpointTest, RejectsDamagedFiles) {
  auto dir = TempDir("ckpt_bad");
  Checkpoint c;
  c.tensors["a"] = torch::ones({64});
  SaveCheckpoint(dir / "x.ckpt", c);
  const auto bytes = Bytes(dir / "x.ckpt");
  {
    std::ofstream out(dir / "short.ckpt", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
  }
  {
    std::ofstream out(dir / "foreign.ckpt", std::ios::binary);
    out << "PNG not a checkpoint at all";
  }
  EXPECT_THROW(LoadCheckpoint(dir / "short.ckpt"), ContractError);
  EXPECT_THROW(LoadCheckpoint(dir / "foreign.ckpt"), ContractError);
  EXPECT_THROW(LoadCheckpoint(dir / "absent.ckpt"), ContractError);
}

TEST(CheckpointTest, ModuleExportImport) {
  torch::manual_seed(4);
  iinet::IINet a(iinet::IINetOptions{.layers_per_level = 1, .width = 4});
  testing::RandomizeParameters(*a, 5);
  torch::manual_seed(6);
  iinet::IINet b(iinet::IINetOptions{.layers_per_level = 1, .width = 4});
  std::map<std::string, torch::Tensor> tensors;
  ExportModule(*a, "net", tensors);
  ImportModule(*b, "net", tensors);
  a->eval();
  b->eval();
  auto z = torch::rand({1, 4, 16, 16}, Gen(7));
  EXPECT_TRUE(torch::equal(a->forward(z), b->forward(z)));
  EXPECT_THROW(ImportModule(*b, "other", tensors), ContractError);
  iinet::IINet wider(iinet::IINetOptions{.layers_per_level = 1, .width = 8});
  EXPECT_THROW(ImportModule(*wider, "net", tensors), ShapeError);
}

TEST(ModelsTest, PipelineArtifactRoundTrip) {
  auto dir = TempDir("models");
  const auto cfg = FromConfig(TinyConfig());
  torch::manual_seed(8);
  auto models = training::MakeModels(cfg.models);
  testing::RandomizeParameters(*models.iinet, 9);
  testing::RandomizeParameters(*models.detector, 10);
  const auto hash = SavePipeline(dir / kPipelineFile, models, cfg.models, 64, {{"note", "x"}});
  auto back = LoadPipeline(dir / kPipelineFile);
  EXPECT_EQ(back.hash, hash);
  EXPECT_EQ(back.resolution, 64);
  EXPECT_EQ(back.metadata.at("note"), "x");
  EXPECT_TRUE(back.trainer_state.empty());
  models.iinet->eval();
  back.models.iinet->eval();
  models.detector->eval();
  back.models.detector->eval();
  auto x = testing::RandomImage(11, 1, 3, 64, 64);
  auto edges = imaging::CannyEdge(x);
  torch::NoGradGuard no_grad;
  EXPECT_TRUE(torch::equal(iinet::Immunize(models.iinet, x, edges).image,
                           iinet::Immunize(back.models.iinet, x, edges).image));
  EXPECT_TRUE(torch::equal(models.detector->forward(x), back.models.detector->forward(x)));
  EXPECT_THROW(LoadKdJpeg(dir / kPipelineFile), ContractError);
}

TEST(ModelsTest, KdJpegArtifactIsFrozen) {
  auto dir = TempDir("kd_models");
  const auto cfg = FromConfig(TinyConfig());
  torch::manual_seed(12);
  kdjpeg::KdJpeg kd(cfg.kdjpeg);
  SaveKdJpeg(dir / kKdJpegFile, kd, cfg.kdjpeg, 64);
  auto back = LoadKdJpeg(dir / kKdJpegFile);
  EXPECT_EQ(back.resolution, 64);
  for (const auto& p : back.model->parameters()) EXPECT_FALSE(p.requires_grad());
  EXPECT_FALSE(back.model->is_training());
  EXPECT_THROW(LoadPipeline(dir / kKdJpegFile), ContractError);
}

TEST(ReportTest, Buckets) {
  EXPECT_EQ(TamperRateBucket(0.0), "[0,0.1]");
  EXPECT_EQ(TamperRateBucket(0.1), "[0,0.1]");
  EXPECT_EQ(TamperRateBucket(0.15), "(0.1,0.2]");
  EXPECT_EQ(TamperRateBucket(0.25), "(0.2,0.3]");
  EXPECT_EQ(TamperRateBucket(0.3), "(0.2,0.3]");
  EXPECT_EQ(TamperRateBucket(0.45), "(0.3,0.5]");
  EXPECT_EQ(TamperRateBucket(0.8), "(0.5,1]");
}

EvaluationRow Row(const std::string& attack, double rate, double f1, double region) {
  EvaluationRow r;
  r.id = attack + std::to_string(rate);
  r.attack = attack;
  r.tamper_rate = rate;
  r.f1 = f1;
  r.psnr_tampered_region = region;
  return r;
}

TEST(ReportTest, AggregatesSkipNotApplicable) {
  EvaluationReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.Add(Row("jpeg", 0.25, 0.5, 20.0));
  report.Add(Row("jpeg", 0.0, 1.0, nan));
  report.Add(Row("identity", 0.22, 0.9, 30.0));
  const auto overall = report.Overall();
  EXPECT_EQ(overall.count, 3);
  const auto& names = MetricNames();
  const auto index = [&](const std::string& n) {
    for (size_t i = 0; i < names.size(); ++i) {
      if (names[i] == n) return i;
    }
    ADD_FAILURE() << n;
    return size_t{0};
  };
  EXPECT_NEAR(overall.mean[index("f1")], 0.8, 1e-12);
  EXPECT_NEAR(overall.mean[index("psnr_tampered_region")], 25.0, 1e-12);
  auto by_attack = report.ByAttack();
  ASSERT_EQ(by_attack.size(), 2u);
  EXPECT_EQ(by_attack.at("jpeg").count, 2);
  EXPECT_NEAR(by_attack.at("jpeg").mean[index("psnr_tampered_region")], 20.0, 1e-12);
  auto by_bucket = report.ByBucket();
  EXPECT_EQ(by_bucket.at("(0.2,0.3]").count, 2);
  EXPECT_EQ(by_bucket.at("[0,0.1]").count, 1);
  EXPECT_TRUE(std::isnan(by_bucket.at("[0,0.1]").mean[index("psnr_tampered_region")]));
  EXPECT_TRUE(std::isnan(AggregateRows({}).mean[0]));

  auto dir = TempDir("report");
  report.WriteCsv(dir / "report.csv");
  report.WriteSummary(dir / "summary.txt");
  std::ifstream csv(dir / "report.csv");
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 4);
  const auto charts = report.WriteCharts(dir / "charts");
  EXPECT_EQ(charts.size(), 3u);
  for (const auto& c : charts) EXPECT_TRUE(fs::exists(c));
}

TEST(SyntheticTest, DeterministicAndOnTheGrid) {
  auto a = SyntheticImage(64, 5), b = SyntheticImage(64, 5), c = SyntheticImage(64, 6);
  EXPECT_EQ(a.sizes(), (std::vector<int64_t>{3, 64, 64}));
  EXPECT_TRUE(torch::equal(a, b));
  EXPECT_FALSE(torch::equal(a, c));
  EXPECT_TRUE(torch::equal(imaging::Quantize8Bit(a), a));
  EXPECT_GT(a.std().item<float>(), 0.05f);
}

TEST(DatasetTest, LoadsSortedAndCaches) {
  auto dir = TempDir("dataset");
  WriteSyntheticCorpus(dir, 3, 80, 1);
  { std::ofstream junk(dir / "notes.txt"); junk << "x"; }
  auto listed = ListImages(dir);
  ASSERT_EQ(listed.size(), 3u);
  EXPECT_EQ(listed[0].filename(), "synth_0000.png");
  auto records = LoadImageDirectory(dir, 64);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].image.sizes(), (std::vector<int64_t>{3, 64, 64}));

  auto cache = TempDir("dataset_cache");
  setenv("IMMUNET_CACHE_DIR", cache.c_str(), 1);
  auto first = LoadTrainingImages(dir, 64);
  ASSERT_FALSE(fs::is_empty(cache));
  auto second = LoadTrainingImages(dir, 64);
  unsetenv("IMMUNET_CACHE_DIR");
  ASSERT_EQ(first.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(torch::equal(first[i], records[i].image));
    EXPECT_TRUE(torch::equal(second[i], records[i].image));
  }
}

// A model directory with a tiny, non-trivial pipeline and an untrained
// KD-JPEG next to it, plus three source images.
class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = TempDir("commands");
    cfg_ = FromConfig(TinyConfig());
    WriteSyntheticCorpus(root_ / "src", 3, 64, 21);
    torch::manual_seed(22);
    auto models = training::MakeModels(cfg_.models);
    testing::RandomizeParameters(*models.iinet, 23);
    fs::create_directories(root_ / "model");
    SavePipeline(root_ / "model" / kPipelineFile, models, cfg_.models, 64);
  }

  void Immunize() { ASSERT_EQ(CmdImmunize({root_ / "src", root_ / "model", root_ / "imm"}), 3); }

  int64_t Attack(const std::string& out, attack::TamperKind tamper, attack::PostKind post, uint64_t seed = 5) {
    AttackSpec spec;
    spec.tamper = tamper;
    spec.post = post;
    spec.rate = 0.2;
    return CmdAttack({root_ / "imm", root_ / out, spec, seed});
  }

  json Manifest(const std::string& out, const char* name = kAttackManifest) {
    std::ifstream in(root_ / out / name);
    return json::parse(in);
  }

  fs::path root_;
  PipelineConfig cfg_;
};

TEST_F(CommandsTest, ImmunizedFilesReReadBitwise) {
  Immunize();
  auto model = LoadPipeline(root_ / "model" / kPipelineFile);
  model.models.iinet->eval();
  torch::NoGradGuard no_grad;
  for (const auto& path : ListImages(root_ / "src")) {
    auto image = imaging::AsBatch(imaging::ResizeCenterCrop(imaging::ReadImage(path), 64));
    auto expected = imaging::Quantize8Bit(iinet::Immunize(model.models.iinet, image, imaging::CannyEdge(image)).image);
    auto written = imaging::ReadImage(root_ / "imm" / (path.stem().string() + ".png"));
    EXPECT_TRUE(torch::equal(written.unsqueeze(0), expected)) << path;
    EXPECT_FALSE(torch::equal(expected, image));
  }
  auto m = Manifest("imm", kImmunizeManifest);
  EXPECT_EQ(m.at("items").size(), 3u);
  EXPECT_EQ(m.at("resolution"), 64);
}

TEST_F(CommandsTest, AttackReplayIsByteIdentical) {
  Immunize();
  ASSERT_EQ(Attack("att", attack::TamperKind::kSplicing, attack::PostKind::kGaussianBlur), 3);
  ASSERT_EQ(CmdAttackReplay(root_ / "att" / kAttackManifest, root_ / "replay"), 3);
  auto a = Manifest("att"), b = Manifest("replay");
  for (size_t i = 0; i < 3; ++i) {
    const auto& ia = a["items"][i];
    const auto& ib = b["items"][i];
    EXPECT_EQ(Bytes(ia.at("attacked").get<std::string>()), Bytes(ib.at("attacked").get<std::string>()));
    EXPECT_EQ(Bytes(ia.at("mask").get<std::string>()), Bytes(ib.at("mask").get<std::string>()));
    EXPECT_EQ(ia.at("plan"), ib.at("plan"));
    EXPECT_GT(ia.at("tamper_rate").get<double>(), 0.1);
  }
  // Same seed, same plans; a different seed changes them.
  Attack("again", attack::TamperKind::kSplicing, attack::PostKind::kGaussianBlur);
  EXPECT_EQ(Manifest("again")["items"][0]["plan"], a["items"][0]["plan"]);
  Attack("other", attack::TamperKind::kSplicing, attack::PostKind::kGaussianBlur, 6);
  EXPECT_NE(Manifest("other")["items"][0]["plan"], a["items"][0]["plan"]);
}

TEST_F(CommandsTest, NoTamperGivesZeroMask) {
  Immunize();
  Attack("none", attack::TamperKind::kNone, attack::PostKind::kIdentity);
  for (const auto& item : Manifest("none")["items"]) {
    EXPECT_EQ(imaging::ReadGray(item.at("mask").get<std::string>()).sum().item<float>(), 0.0f);
    EXPECT_EQ(item.at("tamper_rate").get<double>(), 0.0);
    // Identity post-processing of an untouched image: the immunized pixels.
    EXPECT_TRUE(torch::equal(imaging::ReadImage(item.at("attacked").get<std::string>()),
                             imaging::ReadImage(item.at("immunized").get<std::string>())));
  }
}

TEST_F(CommandsTest, JpegAttackUsesTheRealCodec) {
  Immunize();
  Attack("jpeg", attack::TamperKind::kNone, attack::PostKind::kJpeg);
  for (const auto& item : Manifest("jpeg")["items"]) {
    const fs::path attacked = item.at("attacked").get<std::string>();
    const int q = item.at("plan").at("post_params").at("jpeg_quality").get<int>();
    auto x = imaging::AsBatch(imaging::ReadImage(item.at("immunized").get<std::string>()));
    if (q < 100) {
      EXPECT_EQ(attacked.extension(), ".jpg");
      const auto bytes = Bytes(attacked);
      EXPECT_EQ(std::vector<uint8_t>(bytes.begin(), bytes.end()), imaging::EncodeJpeg(x[0], q));
    }
    EXPECT_TRUE(torch::equal(imaging::AsBatch(imaging::ReadImage(attacked)), kdjpeg::RealJpeg(x, q)));
  }
}

TEST_F(CommandsTest, LocalizeRecoverAndEvaluateAgree) {
  Immunize();
  Attack("att", attack::TamperKind::kCopyMove, attack::PostKind::kCrop);
  auto report = CmdLocalizeRecover({root_ / "att", root_ / "model", root_ / "lr", std::nullopt});
  ASSERT_EQ(report.rows().size(), 3u);
  for (const char* f : {"pairs.json", "report.csv", "summary.txt"}) EXPECT_TRUE(fs::exists(root_ / "lr" / f)) << f;
  auto again = CmdEvaluate({root_ / "lr" / kPairsManifest, root_ / "eval"});
  ASSERT_EQ(again.rows().size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    const auto a = MetricValues(report.rows()[i]), b = MetricValues(again.rows()[i]);
    for (int k = 0; k < kMetricCount; ++k) {
      if (std::isnan(a[k])) {
        EXPECT_TRUE(std::isnan(b[k]));
      } else {
        EXPECT_EQ(a[k], b[k]) << MetricNames()[k];
      }
    }
    EXPECT_EQ(report.rows()[i].attack, "crop");
  }
}

TEST_F(CommandsTest, EvaluateSkipsIncompletePairs) {
  Immunize();
  Attack("att", attack::TamperKind::kSplicing, attack::PostKind::kIdentity);
  CmdLocalizeRecover({root_ / "att", root_ / "model", root_ / "lr", std::nullopt});
  auto m = Manifest("lr", kPairsManifest);
  fs::remove(m["pairs"][1]["recovered"].get<std::string>());
  EXPECT_EQ(CmdEvaluate({root_ / "lr" / kPairsManifest, root_ / "eval"}).rows().size(), 2u);
}

TEST_F(CommandsTest, LocalizeRecoverWithoutGroundTruth) {
  Immunize();
  // A fresh detector starts at "untampered" everywhere.
  auto report = CmdLocalizeRecover({root_ / "imm", root_ / "model", root_ / "plain", std::nullopt});
  EXPECT_TRUE(report.rows().empty());
  for (const auto& path : ListImages(root_ / "imm")) {
    const auto id = path.stem().string();
    EXPECT_EQ(imaging::ReadGray(root_ / "plain" / "masks" / (id + ".png")).sum().item<float>(), 0.0f);
    EXPECT_TRUE(fs::exists(root_ / "plain" / "recovered" / (id + ".png")));
  }
  EXPECT_FALSE(fs::exists(root_ / "plain" / kPairsManifest));
}

TEST_F(CommandsTest, WrongResolutionIsAShapeError) {
  Immunize();
  auto big = TempDir("commands_big");
  WriteSyntheticCorpus(big, 1, 128, 3);
  EXPECT_THROW(CmdLocalizeRecover({big, root_ / "model", root_ / "big_out", std::nullopt}), ShapeError);
}

class TrainCommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cfg_ = FromConfig(TinyConfig());
    torch::manual_seed(30);
    kdjpeg::KdJpeg kd(cfg_.kdjpeg);
    for (const char* d : {"a", "b"}) {
      dirs_.push_back(TempDir(std::string("train_") + d));
      SaveKdJpeg(dirs_.back() / kKdJpegFile, kd, cfg_.kdjpeg, 64);
    }
  }
  PipelineConfig cfg_;
  std::vector<fs::path> dirs_;
};

TEST_F(TrainCommandTest, RefusesWithoutKdJpeg) {
  auto empty = TempDir("train_empty");
  EXPECT_THROW(CmdTrain({cfg_, empty}), ContractError);
}

TEST_F(TrainCommandTest, InterruptedRunMatchesStraightRun) {
  auto straight = CmdTrain({cfg_, dirs_[0]});
  EXPECT_TRUE(straight.finished);
  EXPECT_EQ(straight.step, 4);
  EXPECT_FALSE(straight.resumed);

  auto first = CmdTrain({cfg_, dirs_[1], 3});
  EXPECT_FALSE(first.finished);
  EXPECT_EQ(first.step, 3);
  auto second = CmdTrain({cfg_, dirs_[1]});
  EXPECT_TRUE(second.resumed);
  EXPECT_TRUE(second.finished);
  EXPECT_EQ(second.step, 4);

  auto a = LoadPipeline(dirs_[0] / kPipelineFile), b = LoadPipeline(dirs_[1] / kPipelineFile);
  EXPECT_EQ(a.metadata.at("finished"), true);
  auto ma = a.models.Modules(), mb = b.models.Modules();
  for (size_t k = 0; k < ma.size(); ++k) {
    auto pb = mb[k].second->named_parameters();
    for (const auto& p : ma[k].second->named_parameters())
      EXPECT_TRUE(torch::equal(p.value(), pb[p.key()])) << ma[k].first << "." << p.key();
  }
  // The log carries each step exactly once.
  std::ifstream csv(dirs_[1] / "metrics.csv");
  std::string line;
  std::getline(csv, line);
  std::vector<int64_t> steps;
  while (std::getline(csv, line)) steps.push_back(std::stoll(line.substr(0, line.find(','))));
  EXPECT_EQ(steps, (std::vector<int64_t>{0, 1, 2, 3}));
}

TEST_F(TrainCommandTest, ConfigHashMismatchIsFatal) {
  CmdTrain({cfg_, dirs_[0], 1});
  auto changed = TinyConfig();
  changed.Set("train.alpha", "4");
  try {
    CmdTrain({FromConfig(changed), dirs_[0]});
    FAIL() << "resumed with a different config";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("config hash"), std::string::npos);
  }
}

TEST_F(TrainCommandTest, ResolutionMismatchWithKdJpeg) {
  auto c = TinyConfig();
  c.Set("resolution", "128");
  EXPECT_THROW(CmdTrain({FromConfig(c), dirs_[0]}), ContractError);
}

}  // namespace
}  // namespace immunet::pipeline
