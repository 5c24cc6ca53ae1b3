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

#include "heat/app/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace heat::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Getter {
 public:
  explicit Getter(const KeyValues& kv) : kv_(kv) {}

  const std::string& str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  }

  double real(const std::string& key) const {
    const auto& s = str(key);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": not a number '" + s + "'");
    return v;
  }

  size_t count(const std::string& key) const { return to_count(key, str(key)); }

  uint64_t u64(const std::string& key) const {
    const auto& s = str(key);
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": not an unsigned integer '" + s + "'");
    return v;
  }

  bool flag(const std::string& key) const { return to_flag(key, str(key)); }

  static size_t to_count(const std::string& key, const std::string& s) {
    size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": not a count '" + s + "'");
    return v;
  }

  static bool to_flag(const std::string& key, const std::string& raw) {
    const auto s = lower(raw);
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw ConfigError(key + ": not a boolean '" + raw + "'");
  }

 private:
  const KeyValues& kv_;
};

SamplerKind sampler_kind(const std::string& key, const std::string& s) {
  if (s == "uniform") return SamplerKind::kUniform;
  if (s == "tiling") return SamplerKind::kTiling;
  throw ConfigError(key + ": expected uniform|tiling, got '" + s + "'");
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KeyValues parse_ini(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

KeyValues load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  return parse_ini(in);
}

std::string to_ini(const KeyValues& kv) {
  std::ostringstream out;
  std::string current;
  bool first = true;
  for (const auto& [key, value] : kv) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (first || section != current) {
      if (!first) out << '\n';
      out << '[' << section << "]\n";
      current = section;
      first = false;
    }
    out << name << " = " << value << '\n';
  }
  return out.str();
}

const KeyValues& default_config() {
  static const KeyValues defaults = {
      {"data.train", ""},
      {"data.test", ""},
      {"data.format", "adjacency"},
      {"data.source", "files"},

      {"synthetic.users", "2000"},
      {"synthetic.items", "4000"},
      {"synthetic.degree", "20"},
      {"synthetic.clusters", "25"},
      {"synthetic.in_cluster", "0.8"},
      {"synthetic.test_fraction", "0.2"},
      {"synthetic.seed", "1"},

      {"model.dim", "128"},
      {"model.init", "normal"},
      {"model.init_mean", "0"},
      {"model.init_std", "0.01"},

      {"train.epochs", "100"},
      {"train.lr", "0.05"},
      {"train.threads", "1"},
      {"train.negatives", "64"},
      {"train.mu", "1.0"},
      {"train.theta", "0.8"},
      {"train.similarity", "cosine"},
      {"train.seed", "0"},
      {"train.l2_reg", "0"},
      {"train.chunk_size", "512"},
      {"train.profile", "true"},

      {"sampler.kind", "uniform"},
      {"sampler.tile", "1024"},
      {"sampler.interval", "4096"},

      {"aggregator.enabled", "false"},
      {"aggregator.gamma", "0.5"},
      {"aggregator.max_history", "100"},
      {"aggregator.mini_batch", "32"},
      {"aggregator.lr", ""},
      {"aggregator.propagate_history", "false"},

      {"eval.k", "20"},
      {"eval.interval", "0"},
      {"eval.threads", "0"},

      {"output.dir", "runs/latest"},
      {"output.checkpoints", "true"},
      {"output.resume", ""},

      // Gowalla-sized defaults for the tiling model.
      {"tune.num_items", "40981"},
      {"tune.pairs_per_epoch", "810128"},
      {"tune.planned_epochs", "0"},
      {"tune.num_positives", "1"},
      {"tune.positive_hit_ratio", "0"},
      {"tune.l2_bytes", "2097152"},
      {"tune.l3_bytes", "33554432"},
      {"tune.latency_mem", "100"},
      {"tune.latency_l3", "20"},
      {"tune.latency_l2", "5"},
      {"tune.expected_speedup", "1.5"},

      {"bench.warmup_epochs", "1"},
      {"bench.epochs", "1"},
      {"bench.threads", "1,2,4,8"},
      {"bench.samplers", "uniform,tiling"},
      {"bench.aggregator", "off"},
      {"bench.mini_batches", "32"},
  };
  return defaults;
}

KeyValues resolve(const KeyValues& file, const KeyValues& overrides) {
  KeyValues out = default_config();
  for (const auto* layer : {&file, &overrides}) {
    for (const auto& [key, value] : *layer) {
      if (!out.contains(key)) throw ConfigError("unknown config key: " + key);
      out[key] = value;
    }
  }
  return out;
}

RunConfig to_run_config(const KeyValues& kv) {
  const Getter g(kv);
  RunConfig rc;

  rc.train_path = g.str("data.train");
  rc.test_path = g.str("data.test");
  const auto fmt = g.str("data.format");
  if (fmt == "adjacency") {
    rc.format = InteractionFormat::kAdjacency;
  } else if (fmt == "pairs") {
    rc.format = InteractionFormat::kPairs;
  } else {
    throw ConfigError("data.format: expected adjacency|pairs, got '" + fmt + "'");
  }
  const auto source = g.str("data.source");
  if (source != "files" && source != "synthetic") throw ConfigError("data.source: expected files|synthetic");
  rc.synthetic = source == "synthetic";
  rc.synthetic_spec.num_users = g.count("synthetic.users");
  rc.synthetic_spec.num_items = g.count("synthetic.items");
  rc.synthetic_spec.mean_degree = g.real("synthetic.degree");
  rc.synthetic_spec.num_clusters = g.count("synthetic.clusters");
  rc.synthetic_spec.in_cluster = g.real("synthetic.in_cluster");
  rc.synthetic_spec.test_fraction = g.real("synthetic.test_fraction");
  rc.synthetic_spec.seed = g.u64("synthetic.seed");

  auto& t = rc.training;
  t.emb_dim = g.count("model.dim");
  const auto init = g.str("model.init");
  if (init == "normal") {
    rc.init.kind = InitSpec::Kind::kNormal;
  } else if (init == "xavier") {
    rc.init.kind = InitSpec::Kind::kXavier;
  } else {
    throw ConfigError("model.init: expected normal|xavier, got '" + init + "'");
  }
  rc.init.mean = static_cast<float>(g.real("model.init_mean"));
  rc.init.std = static_cast<float>(g.real("model.init_std"));

  t.epochs = g.count("train.epochs");
  t.learning_rate = g.real("train.lr");
  t.num_threads = g.count("train.threads");
  t.num_negatives = g.count("train.negatives");
  t.loss.mu = g.real("train.mu");
  t.loss.theta = g.real("train.theta");
  const auto sim = g.str("train.similarity");
  if (sim == "cosine") {
    t.similarity = Similarity::kCosine;
  } else if (sim == "dot") {
    t.similarity = Similarity::kDot;
  } else {
    throw ConfigError("train.similarity: expected cosine|dot, got '" + sim + "'");
  }
  t.seed = g.u64("train.seed");
  t.l2_reg = g.real("train.l2_reg");
  t.chunk_size = g.count("train.chunk_size");
  t.profile_phases = g.flag("train.profile");

  t.sampler.kind = sampler_kind("sampler.kind", g.str("sampler.kind"));
  if (g.str("sampler.tile") == "auto") {
    rc.auto_tile = true;
  } else {
    t.sampler.tile_size = g.count("sampler.tile");
    t.sampler.refresh_interval = g.count("sampler.interval");
  }

  auto& a = t.aggregator;
  a.enabled = g.flag("aggregator.enabled");
  a.gamma = g.real("aggregator.gamma");
  a.max_history = g.count("aggregator.max_history");
  a.mini_batch = g.count("aggregator.mini_batch");
  if (!g.str("aggregator.lr").empty()) a.learning_rate = g.real("aggregator.lr");
  a.propagate_to_history = g.flag("aggregator.propagate_history");

  rc.k = g.count("eval.k");
  rc.eval_interval = g.count("eval.interval");
  rc.eval_threads = g.count("eval.threads");

  rc.out_dir = g.str("output.dir");
  rc.checkpoints = g.flag("output.checkpoints");
  rc.resume = g.str("output.resume");

  auto& ti = rc.tune.inputs;
  ti.num_items = g.real("tune.num_items");
  rc.tune.planned_epochs = g.count("tune.planned_epochs");
  const size_t epochs = rc.tune.planned_epochs ? rc.tune.planned_epochs : t.epochs;
  ti.total_iterations = g.real("tune.pairs_per_epoch") * static_cast<double>(epochs);
  ti.num_negatives = static_cast<double>(t.num_negatives);
  ti.num_positives = g.real("tune.num_positives");
  ti.positive_hit_ratio = g.real("tune.positive_hit_ratio");
  ti.l2_bytes = g.real("tune.l2_bytes");
  ti.l3_bytes = g.real("tune.l3_bytes");
  ti.latency_mem = g.real("tune.latency_mem");
  ti.latency_l3 = g.real("tune.latency_l3");
  ti.latency_l2 = g.real("tune.latency_l2");
  ti.expected_speedup = g.real("tune.expected_speedup");
  ti.num_threads = t.num_threads;
  ti.emb_dim = t.emb_dim;

  auto& b = rc.bench;
  b.warmup_epochs = g.count("bench.warmup_epochs");
  b.epochs = g.count("bench.epochs");
  if (b.epochs == 0) throw ConfigError("bench.epochs must be >= 1");
  for (const auto& s : split_list(g.str("bench.threads"))) b.threads.push_back(Getter::to_count("bench.threads", s));
  for (const auto& s : split_list(g.str("bench.samplers"))) b.samplers.push_back(sampler_kind("bench.samplers", s));
  for (const auto& s : split_list(g.str("bench.aggregator"))) b.aggregator.push_back(Getter::to_flag("bench.aggregator", s));
  for (const auto& s : split_list(g.str("bench.mini_batches"))) {
    b.mini_batches.push_back(Getter::to_count("bench.mini_batches", s));
  }
  if (b.threads.empty() || b.samplers.empty() || b.aggregator.empty() || b.mini_batches.empty()) {
    throw ConfigError("bench lists must be nonempty");
  }

  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid training config: ") + e.what());
  }
  return rc;
}

}  // namespace heat::app
