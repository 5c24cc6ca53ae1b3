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

#include "heat/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "heat/rng.h"
#include "heat/sampler.h"

namespace heat {

namespace {

using Clock = std::chrono::steady_clock;

// Seed-stream ids; kept distinct so no two consumers share a stream.
enum : uint64_t { kStreamUsers = 1, kStreamItems = 2, kStreamAggregator = 3, kStreamShuffle = 4, kStreamThread = 5 };

// Accumulates elapsed time into one phase and restarts the stopwatch.
class PhaseClock {
 public:
  explicit PhaseClock(bool enabled) : enabled_(enabled) {
    if (enabled_) last_ = Clock::now();
  }
  void reset() {
    if (enabled_) last_ = Clock::now();
  }
  void lap(double& phase) {
    if (!enabled_) return;
    const auto now = Clock::now();
    phase += std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  bool enabled_;
  Clock::time_point last_;
};

struct ThreadPartial {
  double loss_sum = 0.0;
  uint64_t pairs = 0;
  uint64_t degenerate = 0;
  uint64_t flushes = 0;
  uint64_t refreshes = 0;
  PhaseTimes phases;
};

// Per-thread buffers for one (user, positive, negatives) step. Sized once;
// nothing is allocated inside the pair loop.
struct Scratch {
  Scratch(size_t dim, size_t negatives)
      : user(dim), pooled(dim), pos(dim), negs(negatives * dim), neg_ids(negatives), slots(negatives),
        caches(negatives + 1), sim_negs(negatives), dnegs(negatives), user_grad(dim), h_grad(dim),
        item_grads((negatives + 1) * dim), hist_grad(dim) {}

  std::vector<float> user;  // user vector entering the similarity (aggregated if enabled)
  std::vector<float> pooled;
  std::vector<float> pos;
  std::vector<float> negs;
  std::vector<ItemId> neg_ids;
  std::vector<uint32_t> slots;
  std::vector<ForwardCache> caches;  // [0] positive, [1..n] negatives
  std::vector<double> sim_negs;
  std::vector<double> dnegs;
  std::vector<double> user_grad;
  std::vector<double> h_grad;
  std::vector<double> item_grads;  // row 0 positive, rows 1..n negatives
  std::vector<double> hist_grad;
};

void sgd_row(std::span<float> row, std::span<const double> grad, double lr, double l2) {
  for (size_t k = 0; k < row.size(); ++k) {
    const double v = row[k];
    row[k] = static_cast<float>(v - lr * (grad[k] + l2 * v));
  }
}

ForwardCache forward(Similarity sim, double ss, std::span<const float> u, std::span<const float> v) {
  if (sim == Similarity::kCosine) return cosine_forward_with_user_norm(ss, u, v);
  const double st = dot_similarity(u, v);
  return ForwardCache{ss, 0.0, st, st, false};
}

void accumulate_user_grad(Similarity sim, std::span<const float> u, std::span<const float> v,
                          const ForwardCache& c, double scale, std::span<double> out) {
  if (sim == Similarity::kCosine) {
    accumulate_cosine_grad_user(u, v, c, scale, out);
  } else if (scale != 0.0) {
    for (size_t k = 0; k < out.size(); ++k) out[k] += scale * v[k];
  }
}

void item_grad(Similarity sim, std::span<const float> u, std::span<const float> v, const ForwardCache& c,
               double scale, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (sim == Similarity::kCosine) {
    accumulate_cosine_grad_item(u, v, c, scale, out);
  } else {
    for (size_t k = 0; k < out.size(); ++k) out[k] = scale * u[k];
  }
}

void check_shapes(const EmbeddingMatrix& users, const EmbeddingMatrix& items, const InteractionSet& train,
                  const TrainingConfig& cfg, const AggregatorWeights* weights) {
  cfg.validate();
  if (users.dim() != cfg.emb_dim || items.dim() != cfg.emb_dim) {
    throw std::invalid_argument("embedding dim does not match config emb_dim");
  }
  if (users.rows() < train.num_users() || items.rows() < train.num_items()) {
    throw std::invalid_argument("embedding matrices are smaller than the interaction universe");
  }
  if (cfg.sampler.kind == SamplerKind::kFixed) {
    for (ItemId id : cfg.sampler.fixed_negatives) {
      if (id >= items.rows()) throw std::invalid_argument("fixed negative id out of range");
    }
  }
  if (cfg.aggregator.enabled) {
    if (weights == nullptr) throw std::invalid_argument("aggregator enabled but no weights given");
    if (weights->dim() != cfg.emb_dim) throw std::invalid_argument("aggregator weights dim mismatch");
  }
}

}  // namespace

void TrainingConfig::validate() const {
  if (emb_dim == 0) throw std::invalid_argument("emb_dim must be >= 1");
  if (num_negatives == 0) throw std::invalid_argument("num_negatives must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning_rate must be > 0");
  if (num_threads == 0) throw std::invalid_argument("num_threads must be >= 1");
  if (!(loss.mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (!(loss.theta >= -1.0 && loss.theta <= 1.0)) throw std::invalid_argument("theta must lie in [-1, 1]");
  if (!(l2_reg >= 0.0)) throw std::invalid_argument("l2_reg must be >= 0");
  if (chunk_size == 0) throw std::invalid_argument("chunk_size must be >= 1");
  if (sampler.kind == SamplerKind::kTiling && (sampler.tile_size == 0 || sampler.refresh_interval == 0)) {
    throw std::invalid_argument("tile size and refresh interval must be >= 1");
  }
  if (sampler.kind == SamplerKind::kFixed && sampler.fixed_negatives.empty()) {
    throw std::invalid_argument("fixed sampler needs at least one negative id");
  }
  aggregator.validate();
}

PhaseTimes& PhaseTimes::operator+=(const PhaseTimes& o) {
  read_emb += o.read_emb;
  similarity += o.similarity;
  loss += o.loss;
  gradient += o.gradient;
  update += o.update;
  aggregate += o.aggregate;
  return *this;
}

PhaseTimes PhaseTimes::scaled(double f) const {
  return {read_emb * f, similarity * f, loss * f, gradient * f, update * f, aggregate * f};
}

EpochReport train_pairs(EmbeddingMatrix& users, EmbeddingMatrix& items, const InteractionSet& train,
                        std::span<const TrainingPair> pairs, const TrainingConfig& cfg,
                        AggregatorWeights* weights, size_t epoch_index) {
  check_shapes(users, items, train, cfg, weights);
  for (const auto& p : pairs) {
    if (p.user >= users.rows() || p.item >= items.rows()) throw std::invalid_argument("pair id out of range");
  }

  const size_t dim = cfg.emb_dim;
  const size_t n = cfg.num_negatives;
  const size_t num_items = items.rows();
  const bool aggregate = cfg.aggregator.enabled;
  const double lr = cfg.learning_rate;
  const double agg_lr = cfg.aggregator.learning_rate.value_or(lr);
  const Similarity sim = cfg.similarity;
  const size_t chunk = cfg.chunk_size;
  const size_t num_threads = std::max<size_t>(1, cfg.num_threads);

  std::atomic<size_t> next{0};
  std::vector<ThreadPartial> partials(num_threads);
  const auto epoch_start = Clock::now();

  auto worker = [&](size_t tid) {
    ThreadPartial& part = partials[tid];
    Scratch s(dim, n);
    Rng rng = Rng::stream(cfg.seed, derive_seed(kStreamThread, epoch_index, tid));
    std::optional<TileState> tile;
    if (cfg.sampler.kind == SamplerKind::kTiling) {
      tile.emplace(cfg.sampler.tile_size, cfg.sampler.refresh_interval, rng);
      tile->refresh(items);
    }
    std::optional<LocalGradState> local;
    if (aggregate) local.emplace(dim, cfg.aggregator.mini_batch);

    const std::span<const float> user_vec(s.user);
    const std::span<const float> pos_vec(s.pos);
    PhaseClock clock(cfg.profile_phases);

    for (size_t begin = next.fetch_add(chunk); begin < pairs.size(); begin = next.fetch_add(chunk)) {
      const size_t end = std::min(pairs.size(), begin + chunk);
      for (size_t idx = begin; idx < end; ++idx) {
        const UserId u = pairs[idx].user;
        const ItemId pos_id = pairs[idx].item;
        std::span<const ItemId> history;

        // Read: user, positive, and negatives into thread-private buffers.
        clock.reset();
        std::memcpy(s.pos.data(), items.row(pos_id).data(), dim * sizeof(float));
        if (tile) {
          sample_tiled(*tile, items, s.slots);
          for (size_t j = 0; j < n; ++j) {
            s.neg_ids[j] = tile->item_at(s.slots[j]);
            std::memcpy(s.negs.data() + j * dim, tile->row_at(s.slots[j]).data(), dim * sizeof(float));
          }
        } else if (cfg.sampler.kind == SamplerKind::kFixed) {
          const auto& fixed = cfg.sampler.fixed_negatives;
          for (size_t j = 0; j < n; ++j) {
            s.neg_ids[j] = fixed[j % fixed.size()];
            std::memcpy(s.negs.data() + j * dim, items.row(s.neg_ids[j]).data(), dim * sizeof(float));
          }
        } else {
          sample_uniform(num_items, s.neg_ids, rng);
          for (size_t j = 0; j < n; ++j) {
            std::memcpy(s.negs.data() + j * dim, items.row(s.neg_ids[j]).data(), dim * sizeof(float));
          }
        }
        if (!aggregate) std::memcpy(s.user.data(), users.row(u).data(), dim * sizeof(float));
        clock.lap(part.phases.read_emb);

        if (aggregate) {
          history = history_of(train, u, cfg.aggregator.max_history);
          aggregate_forward(users.row(u), items, history, *weights, cfg.aggregator, s.user, s.pooled);
          clock.lap(part.phases.aggregate);
        }

        // Similarities; the user's sum of squares is reduced once and shared.
        const double ss = squared_norm(user_vec);
        s.caches[0] = forward(sim, ss, user_vec, pos_vec);
        for (size_t j = 0; j < n; ++j) {
          s.caches[j + 1] = forward(sim, ss, user_vec, std::span<const float>(s.negs.data() + j * dim, dim));
          s.sim_negs[j] = s.caches[j + 1].sim;
        }
        for (const auto& c : s.caches) part.degenerate += c.degenerate;
        clock.lap(part.phases.similarity);

        part.loss_sum += ccl_loss(s.caches[0].sim, s.sim_negs, cfg.loss);
        const double dpos = ccl_loss_grad(s.caches[0].sim, s.sim_negs, cfg.loss, s.dnegs);
        clock.lap(part.phases.loss);

        // Backward from the cached reductions.
        std::fill(s.h_grad.begin(), s.h_grad.end(), 0.0);
        accumulate_user_grad(sim, user_vec, pos_vec, s.caches[0], dpos, s.h_grad);
        item_grad(sim, user_vec, pos_vec, s.caches[0], dpos, std::span<double>(s.item_grads.data(), dim));
        for (size_t j = 0; j < n; ++j) {
          if (s.dnegs[j] == 0.0) continue;
          const std::span<const float> neg(s.negs.data() + j * dim, dim);
          accumulate_user_grad(sim, user_vec, neg, s.caches[j + 1], s.dnegs[j], s.h_grad);
          item_grad(sim, user_vec, neg, s.caches[j + 1], s.dnegs[j],
                    std::span<double>(s.item_grads.data() + (j + 1) * dim, dim));
        }
        clock.lap(part.phases.gradient);

        if (aggregate) {
          if (cfg.aggregator.propagate_to_history && !history.empty()) {
            history_grad(s.h_grad, *weights, cfg.aggregator, history.size(), s.hist_grad);
          }
          aggregate_backward(s.h_grad, s.pooled, *weights, cfg.aggregator, *local, agg_lr, s.user_grad);
          clock.lap(part.phases.aggregate);
        } else {
          std::copy(s.h_grad.begin(), s.h_grad.end(), s.user_grad.begin());
        }

        // Sparse in-place SGD on the rows this pair touched.
        sgd_row(users.row(u), s.user_grad, lr, cfg.l2_reg);
        sgd_row(items.row(pos_id), std::span<const double>(s.item_grads.data(), dim), lr, cfg.l2_reg);
        for (size_t j = 0; j < n; ++j) {
          if (s.dnegs[j] == 0.0) continue;
          sgd_row(items.row(s.neg_ids[j]), std::span<const double>(s.item_grads.data() + (j + 1) * dim, dim), lr,
                  cfg.l2_reg);
        }
        if (aggregate && cfg.aggregator.propagate_to_history) {
          for (ItemId h : history) sgd_row(items.row(h), s.hist_grad, lr, 0.0);
        }
        clock.lap(part.phases.update);
        ++part.pairs;
      }
    }
    if (tile) part.refreshes = tile->refresh_count();
    if (local) part.flushes = local->flushes;
  };

  if (num_threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(num_threads);
    for (size_t t = 0; t < num_threads; ++t) pool.emplace_back(worker, t);
  }

  EpochReport report;
  report.epoch = epoch_index;
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
  double loss_sum = 0.0;
  for (const auto& p : partials) {
    loss_sum += p.loss_sum;
    report.pairs += p.pairs;
    report.degenerate_count += p.degenerate;
    report.aggregator_flushes += p.flushes;
    report.tile_refreshes += p.refreshes;
    report.phases += p.phases;
  }
  report.phases = report.phases.scaled(1.0 / static_cast<double>(num_threads));
  report.mean_loss = report.pairs ? loss_sum / static_cast<double>(report.pairs) : 0.0;
  return report;
}

EpochReport train_epoch(EmbeddingMatrix& users, EmbeddingMatrix& items, const InteractionSet& train,
                        const TrainingConfig& cfg, AggregatorWeights* weights, size_t epoch_index) {
  check_shapes(users, items, train, cfg, weights);
  const auto pairs = epoch_pairs(train, derive_seed(cfg.seed, kStreamShuffle, epoch_index));
  return train_pairs(users, items, train, pairs, cfg, weights, epoch_index);
}

ModelState init_model(size_t num_users, size_t num_items, const TrainingConfig& cfg, const InitSpec& init) {
  ModelState model;
  InitSpec spec = init;
  spec.seed = derive_seed(cfg.seed, kStreamUsers);
  model.users = init_matrix(num_users, cfg.emb_dim, spec);
  spec.seed = derive_seed(cfg.seed, kStreamItems);
  model.items = init_matrix(num_items, cfg.emb_dim, spec);
  if (cfg.aggregator.enabled) {
    model.aggregator = AggregatorWeights::xavier(cfg.emb_dim, derive_seed(cfg.seed, kStreamAggregator)).matrix();
  }
  return model;
}

TrainResult train(ModelState& model, const InteractionSet& train, const InteractionSet& test,
                  const TrainingConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  if (cfg.aggregator.enabled && !model.aggregator) {
    model.aggregator = AggregatorWeights::xavier(cfg.emb_dim, derive_seed(cfg.seed, kStreamAggregator)).matrix();
  }

  // The weights live in `model` between calls; borrow them for the run.
  std::optional<AggregatorWeights> weights;
  if (cfg.aggregator.enabled) weights.emplace(std::move(*model.aggregator));
  struct Restore {
    ModelState& model;
    std::optional<AggregatorWeights>& weights;
    ~Restore() {
      if (weights) model.aggregator = std::move(weights->matrix());
    }
  } restore{model, weights};
  AggregatorWeights* wptr = weights ? &*weights : nullptr;

  EvalOptions eval;
  eval.k = opts.k;
  eval.similarity = cfg.similarity;
  eval.num_threads = opts.eval_threads ? opts.eval_threads : cfg.num_threads;
  eval.aggregator = wptr;
  eval.aggregator_cfg = cfg.aggregator;

  auto save = [&](const char* name) {
    if (opts.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(opts.checkpoint_dir);
    save_model(model.users, model.items, wptr ? &wptr->matrix() : nullptr, model.epochs_done,
               opts.checkpoint_dir / name);
  };

  TrainResult result;
  std::optional<size_t> last_eval_epoch;
  for (size_t e = model.epochs_done; e < cfg.epochs; ++e) {
    auto report = train_epoch(model.users, model.items, train, cfg, wptr, e);
    model.epochs_done = static_cast<uint32_t>(e + 1);
    if (opts.on_epoch) opts.on_epoch(report);
    result.epochs.push_back(report);

    if (opts.eval_interval != 0 && (e + 1) % opts.eval_interval == 0) {
      const auto m = evaluate(model.users, model.items, train, test, eval);
      result.evaluations.emplace_back(e + 1, m);
      result.final_metrics = m;
      last_eval_epoch = e + 1;
      if (opts.on_eval) opts.on_eval(static_cast<long>(e + 1), m);
      save("latest.ckpt");
      if (m.recall > result.best_recall) {
        result.best_recall = m.recall;
        result.best_epoch = e + 1;
        save("best.ckpt");
      }
    }
  }

  if (last_eval_epoch != model.epochs_done) {
    result.final_metrics = evaluate(model.users, model.items, train, test, eval);
  }
  if (!result.best_epoch || result.final_metrics.recall > result.best_recall) {
    result.best_recall = result.final_metrics.recall;
    result.best_epoch = model.epochs_done;
    save("best.ckpt");
  }
  save("final.ckpt");
  return result;
}

}  // namespace heat
