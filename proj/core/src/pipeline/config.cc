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

#include "immunet/pipeline/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "immunet/errors.h"

namespace immunet::pipeline {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Fnv1aHex(const void* data, size_t size) {
  uint64_t h = 0xcbf29ce484222325ULL;
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config Config::Parse(std::istream& in, const std::string& origin) {
  Config c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    const auto key = Trim(line.substr(0, eq));
    if (key.empty()) throw ContractError(origin + ":" + std::to_string(number) + ": empty key");
    c.entries_[key] = Trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  Require(in.good(), "cannot read config " + path.string());
  return Parse(in, path.string());
}

void Config::Set(const std::string& key, const std::string& value) { entries_[key] = value; }
bool Config::Has(const std::string& key) const { return entries_.count(key) > 0; }

const std::string* Config::Find(const std::string& key) const {
  read_.insert(key);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string Config::GetString(const std::string& key, const std::string& fallback) const {
  const auto* v = Find(key);
  return v ? *v : fallback;
}

double Config::GetDouble(const std::string& key, double fallback) const {
  const auto* v = Find(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);
  Require(end != v->c_str() && *end == '\0', "config key '" + key + "': not a number: " + *v);
  return d;
}

int64_t Config::GetInt(const std::string& key, int64_t fallback) const {
  const auto* v = Find(key);
  if (!v) return fallback;
  char* end = nullptr;
  const long long i = std::strtoll(v->c_str(), &end, 10);
  Require(end != v->c_str() && *end == '\0', "config key '" + key + "': not an integer: " + *v);
  return i;
}

bool Config::GetBool(const std::string& key, bool fallback) const {
  const auto* v = Find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ContractError("config key '" + key + "': not a boolean: " + *v);
}

std::vector<std::string> Config::GetList(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto* v = Find(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> Config::UnreadKeys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!read_.count(k)) out.push_back(k);
  }
  return out;
}

std::string Config::Canonical() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + "=" + v + "\n";
  return s;
}

std::string Config::Hash() const {
  const auto s = Canonical();
  return Fnv1aHex(s.data(), s.size());
}

bool IsSupportedResolution(int64_t r) { return r == 64 || r == 128 || r == 256 || r == 512; }

namespace {

std::vector<std::string> Names(const std::vector<attack::PostKind>& kinds) {
  std::vector<std::string> out;
  for (auto k : kinds) out.push_back(attack::ToString(k));
  return out;
}

std::vector<std::string> Names(const std::vector<attack::TamperKind>& kinds) {
  std::vector<std::string> out;
  for (auto k : kinds) out.push_back(attack::ToString(k));
  return out;
}

}  // namespace

PipelineConfig FromConfig(const Config& c) {
  PipelineConfig p;
  p.resolution = c.GetInt("resolution", p.resolution);
  Require(IsSupportedResolution(p.resolution), "resolution must be one of 64, 128, 256, 512");
  p.seed = static_cast<uint64_t>(c.GetInt("seed", static_cast<int64_t>(p.seed)));

  auto& m = p.models;
  m.iinet.levels = c.GetInt("model.iinet.levels", m.iinet.levels);
  m.iinet.layers_per_level = c.GetInt("model.iinet.layers_per_level", m.iinet.layers_per_level);
  m.iinet.width = c.GetInt("model.iinet.width", m.iinet.width);
  m.iinet.clamp = c.GetDouble("model.iinet.clamp", m.iinet.clamp);
  Require(p.resolution % (int64_t{1} << m.iinet.levels) == 0, "resolution must be divisible by 2^levels");
  m.detector.unet.width = c.GetInt("model.detector.width", m.detector.unet.width);
  m.detector.unet.block_depth = c.GetInt("model.detector.depth", m.detector.unet.block_depth);
  m.detector.head_bias = c.GetDouble("model.detector.head_bias", m.detector.head_bias);
  m.pixel_discriminator.unet.width = c.GetInt("model.d_b.width", m.pixel_discriminator.unet.width);
  m.pixel_discriminator.unet.block_depth = c.GetInt("model.d_b.depth", m.pixel_discriminator.unet.block_depth);
  m.patch_discriminator.width = c.GetInt("model.d_a.width", m.patch_discriminator.width);

  auto& t = p.trainer;
  auto& hp = t.hp;
  hp.alpha = c.GetDouble("train.alpha", hp.alpha);
  hp.beta = c.GetDouble("train.beta", hp.beta);
  hp.gamma = c.GetDouble("train.gamma", hp.gamma);
  hp.omega = c.GetDouble("train.omega", hp.omega);
  hp.lr = c.GetDouble("train.lr", hp.lr);
  hp.lr_floor = c.GetDouble("train.lr_floor", hp.lr_floor);
  hp.batch_size = c.GetInt("train.batch_size", hp.batch_size);
  hp.r_aug = c.GetDouble("train.r_aug", hp.r_aug);
  hp.attacks.clear();
  for (const auto& n : c.GetList("train.attacks", Names(attack::DefaultTrainingAttacks())))
    hp.attacks.push_back(attack::ParsePostKind(n));
  hp.stage1_alpha_mode = training::ParseStage1AlphaMode(c.GetString("train.stage1_alpha_mode", "protection"));
  hp.switch_threshold = c.GetDouble("train.switch_threshold", hp.switch_threshold);
  hp.switch_window = c.GetInt("train.switch_window", hp.switch_window);
  t.stage1_steps = c.GetInt("train.stage1_steps", t.stage1_steps);
  t.stage2_steps = c.GetInt("train.stage2_steps", t.stage2_steps);
  t.switch_on_convergence = c.GetBool("train.switch_on_convergence", t.switch_on_convergence);
  t.require_convergence = c.GetBool("train.require_convergence", t.require_convergence);
  t.sampling.false_alarm_probability = c.GetDouble("train.false_alarm_probability", t.sampling.false_alarm_probability);
  t.sampling.min_rate = c.GetDouble("train.min_rate", t.sampling.min_rate);
  t.sampling.max_rate = c.GetDouble("train.max_rate", t.sampling.max_rate);
  const auto default_kinds = Names(t.sampling.tamper_kinds);
  t.sampling.tamper_kinds.clear();
  for (const auto& n : c.GetList("train.tamper_kinds", default_kinds))
    t.sampling.tamper_kinds.push_back(attack::ParseTamperKind(n));
  t.divergence_factor = c.GetDouble("train.divergence_factor", t.divergence_factor);
  t.divergence_patience = c.GetInt("train.divergence_patience", t.divergence_patience);
  t.seed = p.seed;
  p.train_data = c.GetString("train.data", "");
  p.train_images = c.GetInt("train.synthetic_images", p.train_images);
  p.checkpoint_every = c.GetInt("train.checkpoint_every", p.checkpoint_every);
  Require(p.checkpoint_every > 0, "train.checkpoint_every must be positive");

  auto defaults = detectors::MaskPostprocessParams::ForResolution(p.resolution);
  t.mask_postprocess.threshold = c.GetDouble("mask.threshold", defaults.threshold);
  t.mask_postprocess.erosion = c.GetInt("mask.erosion", defaults.erosion);
  t.mask_postprocess.dilation = c.GetInt("mask.dilation", defaults.dilation);
  t.mask_postprocess.Validate();

  auto& k = p.kdjpeg;
  k.generator.width = c.GetInt("kdjpeg.width", k.generator.width);
  k.generator.block_depth = c.GetInt("kdjpeg.depth", k.generator.block_depth);
  k.predictor.width = c.GetInt("kdjpeg.predictor_width", k.predictor.width);
  k.modulator_hidden = c.GetInt("kdjpeg.modulator_hidden", k.modulator_hidden);
  auto& kt = p.kdjpeg_train;
  kt.batch_size = c.GetInt("kdjpeg.batch_size", kt.batch_size);
  kt.predictor_epochs = c.GetInt("kdjpeg.predictor_epochs", kt.predictor_epochs);
  kt.predictor_target_accuracy = c.GetDouble("kdjpeg.target_accuracy", kt.predictor_target_accuracy);
  kt.generator_epochs = c.GetInt("kdjpeg.generator_epochs", kt.generator_epochs);
  kt.teacher_warmup_epochs = c.GetInt("kdjpeg.teacher_warmup_epochs", kt.teacher_warmup_epochs);
  kt.predictor_lr = c.GetDouble("kdjpeg.predictor_lr", kt.predictor_lr);
  kt.generator_lr = c.GetDouble("kdjpeg.generator_lr", kt.generator_lr);
  kt.epsilon = c.GetDouble("train.epsilon", kt.epsilon);
  hp.epsilon = kt.epsilon;
  kt.student_noise.max_sigma = c.GetDouble("kdjpeg.noise_max_sigma", kt.student_noise.max_sigma);
  kt.student_noise.probability = c.GetDouble("kdjpeg.noise_probability", kt.student_noise.probability);
  kt.seed = p.seed;
  p.kdjpeg_data = c.GetString("kdjpeg.data", "");
  p.kdjpeg_images = c.GetInt("kdjpeg.synthetic_images", p.kdjpeg_images);

  auto& a = p.attack;
  a.tamper = attack::ParseTamperKind(c.GetString("attack.tamper", attack::ToString(a.tamper)));
  a.post = attack::ParsePostKind(c.GetString("attack.post", attack::ToString(a.post)));
  a.rate = c.GetDouble("attack.rate", a.rate);
  a.inpaint_provider = c.GetString("attack.inpaint_provider", a.inpaint_provider);
  a.container = c.GetString("attack.container", a.container);
  Require(a.container == "png" || a.container == "bmp", "attack.container must be png or bmp");
  for (const char* key : {"awgn_sigma", "blur_sigma", "median_kernel", "rescale_factor", "jpeg_quality", "crop_area",
                          "dropout_rate"}) {
    const std::string full = std::string("attack.") + key;
    if (c.Has(full)) a.post_overrides[key] = c.GetDouble(full, 0.0);
  }

  hp.Validate();
  const auto unread = c.UnreadKeys();
  if (!unread.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& u : unread) msg += " " + u;
    throw ContractError(msg);
  }
  p.hash = c.Hash();
  return p;
}

std::filesystem::path CacheDir() {
  if (const char* v = std::getenv("IMMUNET_CACHE_DIR"); v && *v) return v;
  if (const char* v = std::getenv("XDG_CACHE_HOME"); v && *v) return std::filesystem::path(v) / "immunet";
  if (const char* v = std::getenv("HOME"); v && *v) return std::filesystem::path(v) / ".cache" / "immunet";
  return std::filesystem::temp_directory_path() / "immunet-cache";
}

}  // namespace immunet::pipeline
