// Copyright (c) 2026 The heat Authors. All Rights Reserved.
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

#include "heat/app/manifest.h"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <memory>
#include <stdexcept>

#include "json.hpp"

namespace heat::app {

std::string git_blob_sha1_of(const std::string& contents) {
  const std::string header = "blob " + std::to_string(contents.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), contents.data(), contents.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string git_blob_sha1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return git_blob_sha1_of(contents);
}

std::string make_manifest(const std::string& command, const KeyValues& resolved, const RunConfig& rc) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = rc.training.seed;
  j["threads"] = rc.training.num_threads;
  const auto kind = rc.training.sampler.kind;
  j["sampler"] = {{"kind", kind == SamplerKind::kTiling ? "tiling" : kind == SamplerKind::kFixed ? "fixed" : "uniform"},
                  {"tile", rc.training.sampler.tile_size},
                  {"interval", rc.training.sampler.refresh_interval}};
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : resolved) config[k] = v;
  j["config"] = config;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  auto add = [&](const char* name, const std::filesystem::path& p) {
    if (p.empty()) return;
    inputs[name] = {{"path", p.string()},
                    {"bytes", std::filesystem::file_size(p)},
                    {"git_blob_sha1", git_blob_sha1(p)}};
  };
  if (!rc.synthetic) {
    add("train", rc.train_path);
    add("test", rc.test_path);
  }
  if (!rc.resume.empty()) add("resume", rc.resume);
  j["inputs"] = inputs;
  return j.dump(2);
}

}  // namespace heat::app
