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

#ifndef HEAT_SAMPLER_H_
#define HEAT_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/rng.h"

namespace heat {

// n i.i.d. uniform draws over [0, num_items). Positives are not excluded.
void sample_uniform(size_t num_items, std::span<ItemId> out, Rng& rng);
std::vector<ItemId> sample_uniform(size_t num_items, size_t n, Rng& rng);

// Per-thread cache of n1 randomly chosen item rows. Negatives are drawn from
// the tile's slots and read from the tile's private copy of the rows; the
// tile is resampled after every n2 sampling calls.
class TileState {
 public:
  TileState(size_t n1, size_t n2, Rng rng);

  // Loads the first tile. Called by the constructor's users before sampling.
  void refresh(const EmbeddingMatrix& items);

  size_t n1() const { return n1_; }
  size_t n2() const { return n2_; }
  size_t dim() const { return dim_; }
  size_t iter_count() const { return iter_count_; }
  uint64_t refresh_count() const { return refresh_count_; }
  bool initialized() const { return dim_ != 0; }

  ItemId item_at(size_t slot) const { return tile_[slot]; }
  std::span<const ItemId> tile() const { return tile_; }
  std::span<const float> row_at(size_t slot) const { return {rows_.data() + slot * dim_, dim_}; }

  Rng& rng() { return rng_; }

 private:
  friend void sample_tiled(TileState&, const EmbeddingMatrix&, std::span<uint32_t>);

  size_t n1_;
  size_t n2_;
  size_t dim_ = 0;
  size_t iter_count_ = 0;
  uint64_t refresh_count_ = 0;  // refreshes after the initial load
  std::vector<ItemId> tile_;
  std::vector<float> rows_;
  Rng rng_;
};

// Fills `slots` with uniform tile-slot indices, then advances the refresh
// counter; on reaching n2 the whole tile is resampled from `items`.
// Initializes the tile on first use.
void sample_tiled(TileState& state, const EmbeddingMatrix& items, std::span<uint32_t> slots);
std::vector<uint32_t> sample_tiled(TileState& state, const EmbeddingMatrix& items, size_t n);

// Inputs to the tile-size / refresh-interval model. Latencies are relative
// (only ratios matter).
struct TuneInputs {
  double num_items = 0;         // I
  double total_iterations = 0;  // M
  double num_negatives = 64;    // n_n
  double num_positives = 1;     // n_p
  double positive_hit_ratio = 0.0;  // r
  double l2_bytes = 2.0 * 1024 * 1024;
  double l3_bytes = 32.0 * 1024 * 1024;
  double latency_mem = 100;
  double latency_l2 = 5;
  double latency_l3 = 20;
  double expected_speedup = 1.5;  // P
  size_t num_threads = 1;
  size_t emb_dim = 128;

  void validate() const;
};

enum class CacheTier { kL2, kL3, kMemory };
std::string to_string(CacheTier tier);

struct SpeedupEstimate {
  double neg_speedup = 1.0;
  double pos_speedup = 1.0;
  double alpha = 0.0;  // pos_speedup / P (diagnostic only)
  double beta = 0.0;   // neg_speedup / P (diagnostic only)
  double cache_latency = 0.0;
  double tile_bytes = 0.0;
  CacheTier tier = CacheTier::kMemory;
};

struct TilingChoice {
  size_t n1 = 1;
  size_t n2 = 1;
  double n2_by_space = 0.0;    // M * n1 / I
  double n2_by_speedup = 0.0;  // n1 / (beta * P)
};

// Fixed negative share of the expected speedup used to pick n2.
inline constexpr double kNegativeSpeedupShare = 0.85;
inline constexpr double kPositiveSpeedupShare = 0.15;

// Largest power of two n1 such that num_threads tiles of n1 rows fill at most
// half of L2.
size_t tile_size_for_cache(double l2_bytes, size_t num_threads, size_t emb_dim);

SpeedupEstimate estimate_speedup(const TuneInputs& in, size_t n1, size_t n2);
TilingChoice tune_tiling(const TuneInputs& in);

}  // namespace heat

#endif  // HEAT_SAMPLER_H_
