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

#ifndef HEAT_EVALUATOR_H_
#define HEAT_EVALUATOR_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heat/aggregator.h"
#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/kernels.h"

namespace heat {

struct MetricsReport {
  double recall = 0.0;
  double ndcg = 0.0;
  size_t k = 20;
  size_t users_evaluated = 0;
};

class EmptyTestSet : public std::runtime_error {
 public:
  EmptyTestSet() : std::runtime_error("no user has a test item") {}
};

struct EvalOptions {
  size_t k = 20;
  Similarity similarity = Similarity::kCosine;
  size_t num_threads = 1;
  // When set (and cfg.enabled), users are ranked by their aggregated vector.
  const AggregatorWeights* aggregator = nullptr;
  AggregatorConfig aggregator_cfg;
};

// The k best items for `user_vec`, skipping ids in the sorted `exclude` list.
// Ties go to the lower item id.
std::vector<ItemId> topk_items(std::span<const float> user_vec, const EmbeddingMatrix& items,
                               std::span<const ItemId> exclude, size_t k, Similarity similarity);

// Mean Recall@k and NDCG@k over users with a nonempty test slice; train
// positives are removed from each user's candidate list.
MetricsReport evaluate(const EmbeddingMatrix& users, const EmbeddingMatrix& items, const InteractionSet& train,
                       const InteractionSet& test, const EvalOptions& opts);

// Per-user metrics from a ranked list.
double recall_at_k(std::span<const ItemId> ranked, std::span<const ItemId> test_items);
double ndcg_at_k(std::span<const ItemId> ranked, std::span<const ItemId> test_items, size_t k);

// {"epoch":..,"recall@K":..,"ndcg@K":..,"users":..}
std::string metrics_json(const MetricsReport& m, long epoch);

}  // namespace heat

#endif  // HEAT_EVALUATOR_H_
