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

#ifndef HEAT_AGGREGATOR_H_
#define HEAT_AGGREGATOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heat/dataset.h"
#include "heat/embedding.h"

namespace heat {

// Behavior aggregation with average pooling:
//
//   pooled = mean of the user's history item rows   (zero if no history)
//   h      = gamma * user + (1 - gamma) * pooled W
//
// W is K x K and multiplies `pooled` as a row vector (h[b] += pooled[k] *
// W[k][b]), so the weight gradient is the row-wise outer product
// row k = pooled[k] * h_grad.
struct AggregatorConfig {
  bool enabled = false;
  double gamma = 0.5;
  size_t max_history = 100;
  size_t mini_batch = 32;  // local accumulation steps per shared update
  std::optional<double> learning_rate;  // defaults to the embedding rate
  bool propagate_to_history = false;

  void validate() const;
};

// Shared K x K weight matrix; trainer threads read and update it without
// locks.
class AggregatorWeights {
 public:
  AggregatorWeights() = default;
  explicit AggregatorWeights(EmbeddingMatrix w);
  static AggregatorWeights xavier(size_t dim, uint64_t seed);

  size_t dim() const { return w_.dim(); }
  const EmbeddingMatrix& matrix() const { return w_; }
  EmbeddingMatrix& matrix() { return w_; }
  float* data() { return w_.data(); }
  const float* data() const { return w_.data(); }

 private:
  EmbeddingMatrix w_;
};

// Per-thread gradient accumulator for the shared weights.
struct LocalGradState {
  LocalGradState(size_t dim, size_t mini_batch);

  std::vector<double> accu;  // dim * dim, row-major
  size_t count = 0;
  size_t mini_batch;
  uint64_t flushes = 0;
};

void aggregate_forward(std::span<const float> user_vec, const EmbeddingMatrix& items,
                       std::span<const ItemId> history, const AggregatorWeights& w,
                       const AggregatorConfig& cfg, std::span<float> h, std::span<float> pooled);

// Accumulates the weight gradient for one step, returns gamma * h_grad in
// user_grad, and every `mini_batch` steps applies w -= lr * accu / mini_batch
// to the shared matrix and clears the accumulator. Returns true on a flush.
bool aggregate_backward(std::span<const double> h_grad, std::span<const float> pooled,
                        AggregatorWeights& w, const AggregatorConfig& cfg, LocalGradState& local,
                        double learning_rate, std::span<double> user_grad);

// Gradient reaching each history row: (1 - gamma) / |history| * W h_grad.
void history_grad(std::span<const double> h_grad, const AggregatorWeights& w, const AggregatorConfig& cfg,
                  size_t history_len, std::span<double> out);

}  // namespace heat

#endif  // HEAT_AGGREGATOR_H_
