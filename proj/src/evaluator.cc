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

#include "heat/evaluator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>

#include "json.hpp"

namespace heat {

namespace {

constexpr size_t kUserBlock = 32;
constexpr size_t kItemBlock = 512;

struct Candidate {
  double score;
  ItemId id;
};

// Orders the heap so that its top is the worst retained candidate.
struct WorseFirst {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  }
};

bool better(const Candidate& a, const Candidate& b) {
  return a.score > b.score || (a.score == b.score && a.id < b.id);
}

class TopK {
 public:
  explicit TopK(size_t k) : k_(k) {}

  void offer(double score, ItemId id) {
    const Candidate c{score, id};
    if (heap_.size() < k_) {
      heap_.push(c);
    } else if (better(c, heap_.top())) {
      heap_.pop();
      heap_.push(c);
    }
  }

  std::vector<ItemId> ranked() {
    std::vector<Candidate> all;
    all.reserve(heap_.size());
    while (!heap_.empty()) {
      all.push_back(heap_.top());
      heap_.pop();
    }
    std::sort(all.begin(), all.end(), better);
    std::vector<ItemId> ids;
    ids.reserve(all.size());
    for (const auto& c : all) ids.push_back(c.id);
    return ids;
  }

 private:
  size_t k_;
  std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> heap_;
};

std::vector<double> item_square_norms(const EmbeddingMatrix& items) {
  std::vector<double> norms(items.rows());
  for (size_t i = 0; i < items.rows(); ++i) norms[i] = squared_norm(items.row(i));
  return norms;
}

double score(Similarity sim, double ss, double tt, double st) {
  return sim == Similarity::kDot ? st : cosine_from_sums(ss, tt, st).sim;
}

// Scores a block of users against all items, block by block over items so a
// slab of item rows stays cache-resident across the user block.
void rank_block(std::span<const std::span<const float>> user_vecs,
                std::span<const std::span<const ItemId>> excludes, const EmbeddingMatrix& items,
                std::span<const double> item_tt, size_t k, Similarity sim, std::vector<std::vector<ItemId>>& out) {
  const size_t nu = user_vecs.size();
  std::vector<TopK> heaps(nu, TopK(k));
  std::vector<size_t> cursor(nu, 0);
  std::vector<double> user_ss(nu);
  for (size_t b = 0; b < nu; ++b) user_ss[b] = squared_norm(user_vecs[b]);

  for (size_t base = 0; base < items.rows(); base += kItemBlock) {
    const size_t end = std::min(items.rows(), base + kItemBlock);
    for (size_t b = 0; b < nu; ++b) {
      const auto ex = excludes[b];
      size_t& c = cursor[b];
      for (size_t i = base; i < end; ++i) {
        while (c < ex.size() && ex[c] < i) ++c;
        if (c < ex.size() && ex[c] == i) continue;
        const double st = dot_similarity(user_vecs[b], items.row(i));
        heaps[b].offer(score(sim, user_ss[b], item_tt[i], st), static_cast<ItemId>(i));
      }
    }
  }
  out.resize(nu);
  for (size_t b = 0; b < nu; ++b) out[b] = heaps[b].ranked();
}

}  // namespace

std::vector<ItemId> topk_items(std::span<const float> user_vec, const EmbeddingMatrix& items,
                               std::span<const ItemId> exclude, size_t k, Similarity similarity) {
  if (k == 0) throw std::invalid_argument("topk_items: k must be >= 1");
  if (user_vec.size() != items.dim()) throw std::invalid_argument("topk_items: dimension mismatch");
  const auto tt = item_square_norms(items);
  const std::span<const float> users[] = {user_vec};
  const std::span<const ItemId> ex[] = {exclude};
  std::vector<std::vector<ItemId>> out;
  rank_block(users, ex, items, tt, k, similarity, out);
  return std::move(out[0]);
}

double recall_at_k(std::span<const ItemId> ranked, std::span<const ItemId> test_items) {
  if (test_items.empty()) return 0.0;
  size_t hits = 0;
  for (ItemId id : ranked) {
    if (std::binary_search(test_items.begin(), test_items.end(), id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test_items.size());
}

double ndcg_at_k(std::span<const ItemId> ranked, std::span<const ItemId> test_items, size_t k) {
  if (test_items.empty()) return 0.0;
  double dcg = 0.0;
  const size_t n = std::min(k, ranked.size());
  for (size_t r = 0; r < n; ++r) {
    if (std::binary_search(test_items.begin(), test_items.end(), ranked[r])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  const size_t ideal = std::min(k, test_items.size());
  for (size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

MetricsReport evaluate(const EmbeddingMatrix& users, const EmbeddingMatrix& items, const InteractionSet& train,
                       const InteractionSet& test, const EvalOptions& opts) {
  if (opts.k == 0) throw std::invalid_argument("evaluate: k must be >= 1");
  if (users.dim() != items.dim()) throw std::invalid_argument("evaluate: user/item dimension mismatch");
  if (test.num_users() > users.rows() || train.num_users() > users.rows() || test.num_items() > items.rows() ||
      train.num_items() > items.rows()) {
    throw std::invalid_argument("evaluate: interaction universe exceeds embedding rows");
  }
  const bool aggregate = opts.aggregator != nullptr && opts.aggregator_cfg.enabled;
  if (aggregate) opts.aggregator_cfg.validate();

  std::vector<UserId> eval_users;
  for (UserId u = 0; u < test.num_users(); ++u) {
    if (!test.items_of(u).empty()) eval_users.push_back(u);
  }
  if (eval_users.empty()) throw EmptyTestSet();

  const auto tt = item_square_norms(items);
  const size_t dim = users.dim();
  std::vector<double> recall(eval_users.size());
  std::vector<double> ndcg(eval_users.size());
  const size_t num_blocks = (eval_users.size() + kUserBlock - 1) / kUserBlock;
  std::atomic<size_t> next_block{0};

  auto worker = [&] {
    std::vector<float> agg_vecs(kUserBlock * dim);
    std::vector<float> pooled(dim);
    std::vector<std::span<const float>> vecs;
    std::vector<std::span<const ItemId>> excludes;
    std::vector<std::vector<ItemId>> ranked;
    for (size_t blk = next_block++; blk < num_blocks; blk = next_block++) {
      const size_t first = blk * kUserBlock;
      const size_t last = std::min(eval_users.size(), first + kUserBlock);
      vecs.clear();
      excludes.clear();
      for (size_t idx = first; idx < last; ++idx) {
        const UserId u = eval_users[idx];
        const auto exclude = u < train.num_users() ? train.items_of(u) : std::span<const ItemId>{};
        excludes.push_back(exclude);
        if (aggregate) {
          std::span<float> h(agg_vecs.data() + (idx - first) * dim, dim);
          const auto hist = u < train.num_users() ? history_of(train, u, opts.aggregator_cfg.max_history)
                                                  : std::span<const ItemId>{};
          aggregate_forward(users.row(u), items, hist, *opts.aggregator, opts.aggregator_cfg, h, pooled);
          vecs.push_back(h);
        } else {
          vecs.push_back(users.row(u));
        }
      }
      rank_block(vecs, excludes, items, tt, opts.k, opts.similarity, ranked);
      for (size_t idx = first; idx < last; ++idx) {
        const auto truth = test.items_of(eval_users[idx]);
        recall[idx] = recall_at_k(ranked[idx - first], truth);
        ndcg[idx] = ndcg_at_k(ranked[idx - first], truth, opts.k);
      }
    }
  };

  const size_t threads = std::max<size_t>(1, std::min(opts.num_threads, num_blocks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Fixed user-id order keeps the sums independent of thread scheduling.
  MetricsReport report;
  report.k = opts.k;
  report.users_evaluated = eval_users.size();
  for (size_t idx = 0; idx < eval_users.size(); ++idx) {
    report.recall += recall[idx];
    report.ndcg += ndcg[idx];
  }
  report.recall /= static_cast<double>(eval_users.size());
  report.ndcg /= static_cast<double>(eval_users.size());
  return report;
}

std::string metrics_json(const MetricsReport& m, long epoch) {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["recall@" + std::to_string(m.k)] = m.recall;
  j["ndcg@" + std::to_string(m.k)] = m.ndcg;
  j["users"] = m.users_evaluated;
  return j.dump();
}

}  // namespace heat
