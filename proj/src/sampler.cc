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

#include "heat/sampler.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace heat {

void sample_uniform(size_t num_items, std::span<ItemId> out, Rng& rng) {
  if (num_items == 0) throw std::invalid_argument("sample_uniform: num_items must be >= 1");
  for (auto& id : out) id = static_cast<ItemId>(rng.below(num_items));
}

std::vector<ItemId> sample_uniform(size_t num_items, size_t n, Rng& rng) {
  std::vector<ItemId> out(n);
  sample_uniform(num_items, out, rng);
  return out;
}

TileState::TileState(size_t n1, size_t n2, Rng rng) : n1_(n1), n2_(n2), rng_(rng) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("TileState: n1 and n2 must be >= 1");
}

void TileState::refresh(const EmbeddingMatrix& items) {
  if (items.rows() == 0) throw std::invalid_argument("TileState: empty item matrix");
  const bool first = !initialized();
  dim_ = items.dim();
  tile_.resize(n1_);
  rows_.resize(n1_ * dim_);
  sample_uniform(items.rows(), tile_, rng_);
  for (size_t j = 0; j < n1_; ++j) {
    std::memcpy(rows_.data() + j * dim_, items.row(tile_[j]).data(), dim_ * sizeof(float));
  }
  iter_count_ = 0;
  if (!first) ++refresh_count_;
}

void sample_tiled(TileState& state, const EmbeddingMatrix& items, std::span<uint32_t> slots) {
  if (!state.initialized()) state.refresh(items);
  for (auto& s : slots) s = static_cast<uint32_t>(state.rng_.below(state.n1_));
  if (++state.iter_count_ == state.n2_) state.refresh(items);
}

std::vector<uint32_t> sample_tiled(TileState& state, const EmbeddingMatrix& items, size_t n) {
  std::vector<uint32_t> slots(n);
  sample_tiled(state, items, slots);
  return slots;
}

void TuneInputs::validate() const {
  if (!(expected_speedup > 0)) throw std::invalid_argument("expected speedup P must be > 0");
  if (!(num_items > 0) || !(total_iterations > 0) || !(num_negatives > 0) || !(num_positives > 0)) {
    throw std::invalid_argument("item count, iterations, negatives and positives must be > 0");
  }
  if (!(l2_bytes > 0) || !(l3_bytes > 0)) throw std::invalid_argument("cache sizes must be > 0");
  if (!(latency_l2 > 0) || !(latency_l2 <= latency_l3) || !(latency_l3 <= latency_mem)) {
    throw std::invalid_argument("latencies must satisfy 0 < t_l2 <= t_l3 <= t_m");
  }
  if (!(positive_hit_ratio >= 0 && positive_hit_ratio <= 1)) {
    throw std::invalid_argument("positive hit ratio must lie in [0, 1]");
  }
  if (num_threads == 0 || emb_dim == 0) throw std::invalid_argument("threads and emb_dim must be >= 1");
}

std::string to_string(CacheTier tier) {
  switch (tier) {
    case CacheTier::kL2: return "L2";
    case CacheTier::kL3: return "L3";
    case CacheTier::kMemory: return "memory";
  }
  return "unknown";
}

size_t tile_size_for_cache(double l2_bytes, size_t num_threads, size_t emb_dim) {
  const double row_bytes = static_cast<double>(emb_dim) * sizeof(float);
  const double budget = l2_bytes / 2.0;
  size_t n1 = 1;
  while (static_cast<double>(num_threads) * static_cast<double>(2 * n1) * row_bytes <= budget) n1 *= 2;
  return n1;
}

SpeedupEstimate estimate_speedup(const TuneInputs& in, size_t n1, size_t n2) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("n1 and n2 must be >= 1");
  SpeedupEstimate est;
  est.tile_bytes = static_cast<double>(n1) * static_cast<double>(in.emb_dim) * sizeof(float) *
                   static_cast<double>(in.num_threads);
  if (est.tile_bytes < in.l2_bytes) {
    est.tier = CacheTier::kL2;
    est.cache_latency = in.latency_l2;
  } else if (est.tile_bytes < in.l3_bytes) {
    est.tier = CacheTier::kL3;
    est.cache_latency = in.latency_l3;
  } else {
    est.tier = CacheTier::kMemory;
    est.cache_latency = in.latency_mem;
  }
  const double t_m = in.latency_mem;
  const double t_c = est.cache_latency;
  const double m = in.total_iterations;
  const double d1 = static_cast<double>(n1);
  const double d2 = static_cast<double>(n2);

  const double neg_time_random = m * in.num_negatives * t_m;
  const double neg_time_tiling = in.num_negatives * (m / d2) * ((d2 - d1) * t_c + d1 * t_m);
  est.neg_speedup = neg_time_random / neg_time_tiling;

  const double r = in.positive_hit_ratio;
  const double np = in.num_positives;
  est.pos_speedup = (np * t_m) / (np * r * t_c + np * (1.0 - r) * t_m);

  est.alpha = est.pos_speedup / in.expected_speedup;
  est.beta = est.neg_speedup / in.expected_speedup;
  return est;
}

TilingChoice tune_tiling(const TuneInputs& in) {
  in.validate();
  TilingChoice c;
  c.n1 = tile_size_for_cache(in.l2_bytes, in.num_threads, in.emb_dim);
  const double n1 = static_cast<double>(c.n1);
  c.n2_by_space = in.total_iterations * n1 / in.num_items;
  c.n2_by_speedup = n1 / (kNegativeSpeedupShare * in.expected_speedup);
  // The smaller interval keeps the larger negative sampling space.
  const double n2 = c.n2_by_space < c.n2_by_speedup ? c.n2_by_space : c.n2_by_speedup;
  c.n2 = static_cast<size_t>(std::max(1.0, std::round(n2)));
  return c;
}

}  // namespace heat
