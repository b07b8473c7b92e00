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

// Command-line front end: immunize, attack, localize-recover, train,
// train-kdjpeg, evaluate, plus a synthetic-corpus helper.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "immunet/errors.h"
#include "immunet/pipeline/commands.h"
#include "immunet/pipeline/config.h"
#include "immunet/pipeline/synthetic.h"

namespace fs = std::filesystem;
using namespace immunet;

namespace {

struct GlobalFlags {
  std::string config;
  int64_t seed = -1;
  int64_t resolution = -1;
  std::string model_dir = "models";
  std::string out;
};

pipeline::Config LoadConfig(const GlobalFlags& g) {
  pipeline::Config c;
  if (!g.config.empty()) c = pipeline::Config::Load(g.config);
  if (g.seed >= 0) c.Set("seed", std::to_string(g.seed));
  if (g.resolution > 0) c.Set("resolution", std::to_string(g.resolution));
  return c;
}

void RequireOut(const GlobalFlags& g, const char* verb) {
  if (g.out.empty()) throw ContractError(std::string(verb) + " needs --out");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image immunization: embed recovery information, localize tampering, recover content."};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "overrides the config seed");
  app.add_option("--resolution", g.resolution, "overrides the config resolution");
  app.add_option("--model-dir", g.model_dir, "directory holding kdjpeg.ckpt and pipeline.ckpt");
  app.add_option("--out", g.out, "output directory");

  std::string input, pairs, replay, container = "png";
  auto* immunize = app.add_subcommand("immunize", "immunize every image of a directory");
  immunize->add_option("input", input, "directory of original images")->required()->check(CLI::ExistingDirectory);
  immunize->add_option("--container", container, "png or bmp");

  std::string tamper, post;
  double rate = -1.0;
  auto* attack_cmd = app.add_subcommand("attack", "tamper with and post-process immunized images");
  attack_cmd->add_option("input", input, "immunized directory (needed unless --replay is given)");
  attack_cmd->add_option("--tamper", tamper, "none, copy_move, splicing or inpainting");
  attack_cmd->add_option("--post", post,
                         "identity, awgn, gaussian_blur, median_blur, rescale, jpeg, crop or dropout");
  attack_cmd->add_option("--rate", rate, "target tamper rate");
  attack_cmd->add_option("--replay", replay, "re-run the plans of an attack manifest")->check(CLI::ExistingFile);

  auto* localize = app.add_subcommand("localize-recover", "predict tamper masks and recover attacked images");
  localize->add_option("input", input, "attack output directory or a folder of images")
      ->required()
      ->check(CLI::ExistingDirectory);

  int64_t max_steps = -1, log_every = 50;
  auto* train = app.add_subcommand("train", "two-stage training of the main pipeline (resumable)");
  train->add_option("--max-steps", max_steps, "stop after this many steps; rerun to resume");
  train->add_option("--log-every", log_every, "progress line interval");

  auto* train_kd = app.add_subcommand("train-kdjpeg", "train the JPEG simulator");

  auto* evaluate = app.add_subcommand("evaluate", "recompute the evaluation report from a pairs manifest");
  evaluate->add_option("pairs", pairs, "pairs.json written by localize-recover")->required()->check(CLI::ExistingFile);

  int64_t count = 8;
  auto* synth = app.add_subcommand("synthesize", "write a procedural image corpus as PNG files");
  synth->add_option("--count", count, "number of images");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*immunize) {
      RequireOut(g, "immunize");
      const auto n = pipeline::CmdImmunize({input, g.model_dir, g.out, container});
      std::printf("immunized %lld images into %s\n", static_cast<long long>(n), g.out.c_str());
    } else if (*attack_cmd) {
      RequireOut(g, "attack");
      int64_t n = 0;
      if (!replay.empty()) {
        n = pipeline::CmdAttackReplay(replay, g.out);
      } else {
        if (input.empty()) throw ContractError("attack needs an immunized directory or --replay");
        auto c = LoadConfig(g);
        if (!tamper.empty()) c.Set("attack.tamper", tamper);
        if (!post.empty()) c.Set("attack.post", post);
        if (rate > 0) c.Set("attack.rate", std::to_string(rate));
        const auto cfg = pipeline::FromConfig(c);
        n = pipeline::CmdAttack({input, g.out, cfg.attack, cfg.seed});
      }
      std::printf("attacked %lld images into %s\n", static_cast<long long>(n), g.out.c_str());
    } else if (*localize) {
      RequireOut(g, "localize-recover");
      pipeline::LocalizeRecoverOptions o{input, g.model_dir, g.out, std::nullopt};
      if (!g.config.empty()) {
        auto cfg = pipeline::FromConfig(LoadConfig(g));
        o.mask = cfg.trainer.mask_postprocess;
      }
      const auto report = pipeline::CmdLocalizeRecover(o);
      if (!report.rows().empty()) {
        const auto all = report.Overall();
        std::printf("%lld images: F1 %.4f, recovery PSNR %.2f dB, report in %s\n", static_cast<long long>(all.count),
                    all.mean[5], all.mean[3], g.out.c_str());
      }
    } else if (*train) {
      const auto cfg = pipeline::FromConfig(LoadConfig(g));
      pipeline::TrainOptions o{cfg, g.model_dir, max_steps, {}};
      o.on_step = [&](const training::StepReport& r) {
        if (log_every > 0 && (r.step + 1) % log_every == 0) {
          std::printf("step %lld stage %d lr %.2e total %.4f rec %.4f loc %.4f prt %.4f null %.4f\n",
                      static_cast<long long>(r.step + 1), r.stage, r.lr, r.total, r.l_rec, r.l_loc, r.l_prt,
                      r.l_null);
          std::fflush(stdout);
        }
        return true;
      };
      const auto s = pipeline::CmdTrain(o);
      std::printf("%s at step %lld (stage %d)%s\n", s.finished ? "finished" : "paused",
                  static_cast<long long>(s.step), s.stage, s.resumed ? ", resumed from checkpoint" : "");
    } else if (*train_kd) {
      const auto cfg = pipeline::FromConfig(LoadConfig(g));
      pipeline::TrainKdJpegOptions o{cfg, g.model_dir, {}};
      o.on_epoch = [](const std::string& stage, int64_t epoch, double metric) {
        std::printf("%s epoch %lld: %.5f\n", stage.c_str(), static_cast<long long>(epoch + 1), metric);
        std::fflush(stdout);
      };
      const auto stats = pipeline::CmdTrainKdJpeg(o);
      std::printf("KD-JPEG trained on %lld images\n", stats.at("images").get<long long>());
    } else if (*evaluate) {
      const fs::path out = g.out.empty() ? fs::path(pairs).parent_path() : fs::path(g.out);
      const auto report = pipeline::CmdEvaluate({pairs, out});
      const auto all = report.Overall();
      std::printf("%lld pairs: F1 %.4f, recovery PSNR %.2f dB, immunized PSNR %.2f dB\n",
                  static_cast<long long>(all.count), all.mean[5], all.mean[3], all.mean[1]);
    } else if (*synth) {
      RequireOut(g, "synthesize");
      const auto cfg = pipeline::FromConfig(LoadConfig(g));
      pipeline::WriteSyntheticCorpus(g.out, count, cfg.resolution, cfg.seed);
      std::printf("wrote %lld images into %s\n", static_cast<long long>(count), g.out.c_str());
    }
  } catch (const ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }
  return 0;
}
