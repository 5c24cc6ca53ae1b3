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

#ifndef HEAT_APP_CONFIG_H_
#define HEAT_APP_CONFIG_H_

// Run configuration: an INI-style file of [section] / key = value lines,
// flattened to "section.key" entries. Every key has a default (see
// default_config()); unknown keys are rejected.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/sampler.h"
#include "heat/synthetic.h"
#include "heat/trainer.h"

namespace heat::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_ini(std::istream& in);
KeyValues load_ini(const std::filesystem::path& path);
std::string to_ini(const KeyValues& kv);

const KeyValues& default_config();

// defaults <- file <- overrides; rejects keys absent from the defaults.
KeyValues resolve(const KeyValues& file, const KeyValues& overrides);

struct TuneSettings {
  TuneInputs inputs;          // num_items / total_iterations may come from data
  size_t planned_epochs = 0;  // 0: use train.epochs
};

struct BenchSettings {
  size_t warmup_epochs = 1;
  size_t epochs = 1;
  std::vector<size_t> threads;
  std::vector<SamplerKind> samplers;
  std::vector<bool> aggregator;
  std::vector<size_t> mini_batches;
};

struct RunConfig {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  InteractionFormat format = InteractionFormat::kAdjacency;
  bool synthetic = false;
  SyntheticSpec synthetic_spec;

  TrainingConfig training;
  InitSpec init;
  bool auto_tile = false;  // sampler.tile = auto: pick (n1, n2) with tune_tiling

  size_t k = 20;
  size_t eval_interval = 0;
  size_t eval_threads = 0;

  std::filesystem::path out_dir;
  bool checkpoints = true;
  std::filesystem::path resume;

  TuneSettings tune;
  BenchSettings bench;
};

RunConfig to_run_config(const KeyValues& kv);

std::vector<std::string> split_list(const std::string& s);

}  // namespace heat::app

#endif  // HEAT_APP_CONFIG_H_
