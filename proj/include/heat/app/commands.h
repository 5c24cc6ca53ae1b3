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

#ifndef HEAT_APP_COMMANDS_H_
#define HEAT_APP_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "heat/app/config.h"
#include "heat/dataset.h"
#include "heat/trainer.h"

namespace heat::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Usage/config problems that map to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  InteractionSet train;
  InteractionSet test;
};

// Loads (or generates) train/test and aligns their universes. Missing files
// raise UsageError("dataset not found: <path>").
Dataset load_dataset(const RunConfig& rc, bool need_test);

// Fills (n1, n2) from the tiling model when rc.auto_tile is set, using the
// dataset's item count and pairs per epoch.
void apply_auto_tile(RunConfig& rc, KeyValues& resolved, const InteractionSet& train);

struct BenchRow {
  size_t threads = 1;
  SamplerKind sampler = SamplerKind::kUniform;
  size_t tile = 0;
  size_t interval = 0;
  bool aggregator = false;
  size_t mini_batch = 0;
  size_t epochs = 0;
  double epoch_seconds = 0.0;  // mean over measured epochs
  PhaseTimes phases;           // mean over measured epochs
  double mean_loss = 0.0;
  double speedup = 1.0;       // vs the smallest thread count of the same setup
  double read_speedup = 1.0;  // uniform read time / this row's read time
  std::string note;
};

std::vector<BenchRow> run_bench(const RunConfig& rc, const InteractionSet& train);
std::string bench_csv_header();
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

int cmd_train(RunConfig rc, KeyValues resolved, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& rc, const std::filesystem::path& checkpoint, std::ostream& out, std::ostream& err);
int cmd_tune(const RunConfig& rc, const KeyValues& resolved, const std::filesystem::path& write_back,
             std::ostream& out, std::ostream& err);
int cmd_bench(RunConfig rc, KeyValues resolved, std::ostream& out, std::ostream& err);

// Full command-line entry point (argument parsing + dispatch).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heat::app

#endif  // HEAT_APP_COMMANDS_H_
