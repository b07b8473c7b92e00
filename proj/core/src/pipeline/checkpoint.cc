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

#include "immunet/pipeline/checkpoint.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "immunet/errors.h"
#include "immunet/pipeline/config.h"

namespace immunet::pipeline {

namespace {

constexpr char kMagic[8] = {'I', 'M', 'N', 'T', 'C', 'K', 'P', 'T'};

template <typename T>
void Put(std::vector<char>& buf, T value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

void PutBytes(std::vector<char>& buf, const void* data, size_t size) {
  const auto* p = static_cast<const char*>(data);
  buf.insert(buf.end(), p, p + size);
}

class Reader {
 public:
  Reader(const std::vector<char>& buf, std::string origin) : buf_(buf), origin_(std::move(origin)) {}

  template <typename T>
  T Get() {
    T v;
    std::memcpy(&v, Take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* Take(size_t n) {
    Require(pos_ + n <= buf_.size(), "checkpoint " + origin_ + " is truncated");
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::vector<char>& buf_;
  std::string origin_;
  size_t pos_ = 0;
};

uint8_t DtypeCode(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat:
      return 0;
    case torch::kDouble:
      return 1;
    case torch::kLong:
      return 2;
    default:
      throw ContractError(std::string("checkpoint: unsupported dtype ") + c10::toString(t));
  }
}

torch::ScalarType DtypeFromCode(uint8_t code) {
  switch (code) {
    case 0:
      return torch::kFloat;
    case 1:
      return torch::kDouble;
    case 2:
      return torch::kLong;
  }
  throw ContractError("checkpoint: unknown dtype code");
}

}  // namespace

std::string SaveCheckpoint(const std::filesystem::path& path, Checkpoint& ckpt) {
  std::vector<char> buf;
  PutBytes(buf, kMagic, sizeof(kMagic));
  Put<uint32_t>(buf, kCheckpointVersion);
  const std::string meta = ckpt.metadata.dump();
  Put<uint64_t>(buf, meta.size());
  PutBytes(buf, meta.data(), meta.size());
  Put<uint64_t>(buf, ckpt.tensors.size());
  for (const auto& [name, tensor] : ckpt.tensors) {
    auto t = tensor.detach().cpu().contiguous();
    Put<uint32_t>(buf, static_cast<uint32_t>(name.size()));
    PutBytes(buf, name.data(), name.size());
    Put<uint8_t>(buf, DtypeCode(t.scalar_type()));
    Put<uint32_t>(buf, static_cast<uint32_t>(t.dim()));
    for (auto d : t.sizes()) Put<int64_t>(buf, d);
    PutBytes(buf, t.data_ptr(), t.nbytes());
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(out.good(), "cannot write checkpoint " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    Require(out.good(), "short write on checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  ckpt.hash = Fnv1aHex(buf.data(), buf.size());
  return ckpt.hash;
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), "checkpoint not found: " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(buf, path.string());
  Require(std::memcmp(r.Take(sizeof(kMagic)), kMagic, sizeof(kMagic)) == 0, path.string() + " is not a checkpoint");
  const auto version = r.Get<uint32_t>();
  Require(version == kCheckpointVersion, "unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  const auto meta_size = r.Get<uint64_t>();
  ckpt.metadata = nlohmann::json::parse(std::string(r.Take(meta_size), meta_size));
  const auto count = r.Get<uint64_t>();
  for (uint64_t i = 0; i < count; ++i) {
    const auto name_size = r.Get<uint32_t>();
    std::string name(r.Take(name_size), name_size);
    const auto dtype = DtypeFromCode(r.Get<uint8_t>());
    const auto rank = r.Get<uint32_t>();
    std::vector<int64_t> dims(rank);
    for (auto& d : dims) d = r.Get<int64_t>();
    auto t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    std::memcpy(t.data_ptr(), r.Take(t.nbytes()), t.nbytes());
    ckpt.tensors.emplace(std::move(name), std::move(t));
  }
  ckpt.hash = Fnv1aHex(buf.data(), buf.size());
  return ckpt;
}

void ExportModule(const torch::nn::Module& module, const std::string& prefix,
                  std::map<std::string, torch::Tensor>& out) {
  for (const auto& item : module.named_parameters()) out[prefix + "/" + item.key()] = item.value().detach().clone();
  for (const auto& item : module.named_buffers()) out[prefix + "/" + item.key()] = item.value().detach().clone();
}

void ImportModule(torch::nn::Module& module, const std::string& prefix,
                  const std::map<std::string, torch::Tensor>& in) {
  torch::NoGradGuard no_grad;
  auto copy = [&](const std::string& key, torch::Tensor& target) {
    auto it = in.find(prefix + "/" + key);
    Require(it != in.end(), "checkpoint lacks tensor " + prefix + "/" + key);
    RequireShape(it->second.sizes() == target.sizes(), "checkpoint tensor " + prefix + "/" + key + " has the wrong shape");
    target.copy_(it->second);
  };
  for (auto& item : module.named_parameters()) copy(item.key(), item.value());
  for (auto& item : module.named_buffers()) copy(item.key(), item.value());
}

void RequireMetadata(const Checkpoint& ckpt, const std::string& key, const nlohmann::json& expected,
                     const std::string& what) {
  Require(ckpt.metadata.contains(key), what + ": checkpoint metadata lacks '" + key + "'");
  Require(ckpt.metadata.at(key) == expected, what + ": checkpoint " + key + " is " + ckpt.metadata.at(key).dump() +
                                                 ", expected " + expected.dump());
}

}  // namespace immunet::pipeline
