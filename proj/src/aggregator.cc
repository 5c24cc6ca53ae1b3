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

#include "heat/aggregator.h"

#include <algorithm>
#include <stdexcept>

namespace heat {

void AggregatorConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("aggregator gamma must lie in [0, 1]");
  if (mini_batch == 0) throw std::invalid_argument("aggregator mini_batch must be >= 1");
  if (learning_rate && !(*learning_rate > 0.0)) {
    throw std::invalid_argument("aggregator learning rate must be > 0");
  }
}

AggregatorWeights::AggregatorWeights(EmbeddingMatrix w) : w_(std::move(w)) {
  if (w_.rows() != w_.dim()) throw std::invalid_argument("aggregator weights must be square");
}

AggregatorWeights AggregatorWeights::xavier(size_t dim, uint64_t seed) {
  return AggregatorWeights(init_matrix(dim, dim, InitSpec{InitSpec::Kind::kXavier, 0.0f, 0.0f, seed}));
}

LocalGradState::LocalGradState(size_t dim, size_t mini_batch) : accu(dim * dim, 0.0), mini_batch(mini_batch) {
  if (mini_batch == 0) throw std::invalid_argument("mini_batch must be >= 1");
}

void aggregate_forward(std::span<const float> user_vec, const EmbeddingMatrix& items,
                       std::span<const ItemId> history, const AggregatorWeights& w,
                       const AggregatorConfig& cfg, std::span<float> h, std::span<float> pooled) {
  const size_t k = user_vec.size();
  if (items.dim() != k || w.dim() != k || h.size() != k || pooled.size() != k) {
    throw std::invalid_argument("aggregate_forward: dimension mismatch");
  }
  if (history.size() > cfg.max_history) throw std::invalid_argument("aggregate_forward: history too long");

  // Mean pooling, accumulated in double.
  thread_local std::vector<double> acc;
  acc.assign(k, 0.0);
  for (ItemId id : history) {
    const float* row = items.row(id).data();
    for (size_t d = 0; d < k; ++d) acc[d] += row[d];
  }
  const double inv = history.empty() ? 0.0 : 1.0 / static_cast<double>(history.size());
  for (size_t d = 0; d < k; ++d) pooled[d] = static_cast<float>(acc[d] * inv);

  // pooled W, as a row vector.
  std::fill(acc.begin(), acc.end(), 0.0);
  if (!history.empty()) {
    const float* wp = w.data();
    for (size_t r = 0; r < k; ++r) {
      const double p = pooled[r];
      if (p == 0.0) continue;
      const float* wrow = wp + r * k;
      for (size_t c = 0; c < k; ++c) acc[c] += p * wrow[c];
    }
  }
  const double g = cfg.gamma;
  for (size_t d = 0; d < k; ++d) {
    h[d] = static_cast<float>(g * user_vec[d] + (1.0 - g) * acc[d]);
  }
}

bool aggregate_backward(std::span<const double> h_grad, std::span<const float> pooled,
                        AggregatorWeights& w, const AggregatorConfig& cfg, LocalGradState& local,
                        double learning_rate, std::span<double> user_grad) {
  const size_t k = h_grad.size();
  if (pooled.size() != k || w.dim() != k || user_grad.size() != k || local.accu.size() != k * k) {
    throw std::invalid_argument("aggregate_backward: dimension mismatch");
  }
  const double g = cfg.gamma;
  for (size_t d = 0; d < k; ++d) user_grad[d] = g * h_grad[d];

  const double mix = 1.0 - g;
  for (size_t r = 0; r < k; ++r) {
    const double p = mix * pooled[r];
    if (p == 0.0) continue;
    double* arow = local.accu.data() + r * k;
    for (size_t c = 0; c < k; ++c) arow[c] += p * h_grad[c];
  }

  if (++local.count < local.mini_batch) return false;

  // Unsynchronized read-modify-write of the shared matrix.
  const double step = learning_rate / static_cast<double>(local.mini_batch);
  float* wp = w.data();
  for (size_t e = 0; e < k * k; ++e) {
    wp[e] = static_cast<float>(wp[e] - step * local.accu[e]);
  }
  std::fill(local.accu.begin(), local.accu.end(), 0.0);
  local.count = 0;
  ++local.flushes;
  return true;
}

void history_grad(std::span<const double> h_grad, const AggregatorWeights& w, const AggregatorConfig& cfg,
                  size_t history_len, std::span<double> out) {
  const size_t k = h_grad.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (history_len == 0) return;
  const double scale = (1.0 - cfg.gamma) / static_cast<double>(history_len);
  const float* wp = w.data();
  for (size_t r = 0; r < k; ++r) {
    const float* wrow = wp + r * k;
    double acc = 0.0;
    for (size_t c = 0; c < k; ++c) acc += wrow[c] * h_grad[c];
    out[r] = scale * acc;
  }
}

}  // namespace heat
