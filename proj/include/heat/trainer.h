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

#ifndef HEAT_TRAINER_H_
#define HEAT_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heat/aggregator.h"
#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/evaluator.h"
#include "heat/kernels.h"

namespace heat {

enum class SamplerKind {
  kUniform,
  kTiling,
  kFixed,  // cycles through fixed_negatives; for diagnostics and tests
};

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kUniform;
  size_t tile_size = 1024;         // n1
  size_t refresh_interval = 4096;  // n2
  std::vector<ItemId> fixed_negatives;
};

struct TrainingConfig {
  size_t emb_dim = 128;
  size_t num_negatives = 64;
  double learning_rate = 0.05;
  size_t epochs = 100;
  size_t num_threads = 1;
  Similarity similarity = Similarity::kCosine;
  LossParams loss;
  SamplerConfig sampler;
  AggregatorConfig aggregator;
  uint64_t seed = 0;
  double l2_reg = 0.0;
  // Pairs claimed per grab from the shared work counter.
  size_t chunk_size = 512;
  // Per-phase wall-clock accounting; costs a few clock reads per pair.
  bool profile_phases = true;

  void validate() const;
};

struct PhaseTimes {
  double read_emb = 0.0;
  double similarity = 0.0;
  double loss = 0.0;
  double gradient = 0.0;
  double update = 0.0;
  double aggregate = 0.0;

  double total() const { return read_emb + similarity + loss + gradient + update + aggregate; }
  PhaseTimes& operator+=(const PhaseTimes& o);
  PhaseTimes scaled(double f) const;
};

struct EpochReport {
  size_t epoch = 0;
  double mean_loss = 0.0;
  double wall_seconds = 0.0;
  // Per-thread phase seconds averaged over threads, so they sum to at most
  // the wall time.
  PhaseTimes phases;
  uint64_t degenerate_count = 0;
  uint64_t pairs = 0;
  uint64_t aggregator_flushes = 0;
  uint64_t tile_refreshes = 0;
};

// One pass over `pairs` (each processed exactly once by one thread).
// Embedding rows are updated in place immediately after each pair.
EpochReport train_pairs(EmbeddingMatrix& users, EmbeddingMatrix& items, const InteractionSet& train,
                        std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                        AggregatorWeights* weights, size_t epoch_index);

// Shuffles all train pairs with a per-epoch seed and calls train_pairs.
EpochReport train_epoch(EmbeddingMatrix& users, EmbeddingMatrix& items, const InteractionSet& train,
                        const TrainingConfig& cfg, AggregatorWeights* weights, size_t epoch_index);

struct TrainOptions {
  size_t eval_interval = 0;  // 0: evaluate only at the end
  size_t k = 20;
  size_t eval_threads = 0;   // 0: same as training
  std::filesystem::path checkpoint_dir;  // empty: no checkpoints
  std::function<void(const EpochReport&)> on_epoch;
  std::function<void(long epoch, const MetricsReport&)> on_eval;
};

struct TrainResult {
  MetricsReport final_metrics;
  std::vector<std::pair<size_t, MetricsReport>> evaluations;  // in-run, by epoch
  std::vector<EpochReport> epochs;
  std::optional<size_t> best_epoch;
  double best_recall = -1.0;
};

// Runs epochs model.epochs_done+1 .. cfg.epochs, evaluating every
// eval_interval epochs and once at the end. Writes latest.ckpt after each
// in-run evaluation, best.ckpt on a new best recall, and final.ckpt.
TrainResult train(ModelState& model, const InteractionSet& train, const InteractionSet& test,
                  const TrainingConfig& cfg, const TrainOptions& opts);

// Fresh model with normal-initialized embeddings (and Xavier aggregator
// weights when enabled), sized for the given universes.
ModelState init_model(size_t num_users, size_t num_items, const TrainingConfig& cfg, const InitSpec& init);

}  // namespace heat

#endif  // HEAT_TRAINER_H_
