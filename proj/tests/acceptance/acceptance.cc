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

// Acceptance checks. Each criterion prints one line:
//
//   [PASS] C<n> <name>: <measurements>
//
// Run a single criterion with --criterion N (exit 0 pass, 1 fail, 77 skip) or
// all of them with no arguments. Criteria that need the Gowalla split look for
// train.txt/test.txt under $HEAT_GOWALLA_DIR (default: data/gowalla in the
// source tree) and are skipped when it is absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../support/oracles.h"
#include "CLI11.hpp"
#include "heat/app/commands.h"
#include "heat/app/config.h"
#include "heat/evaluator.h"
#include "heat/kernels.h"
#include "heat/sampler.h"
#include "heat/synthetic.h"
#include "heat/trainer.h"
#include "json.hpp"

namespace heat::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- kernels

struct GradCorpus {
  size_t dim;
  std::vector<std::vector<float>> u, v;
};

std::vector<GradCorpus> gradient_corpus() {
  std::vector<GradCorpus> out;
  Rng rng(20240501);
  for (size_t k : {2u, 64u, 128u}) {
    GradCorpus c{k, {}, {}};
    for (int i = 0; i < 1000; ++i) {
      c.u.push_back(oracle::random_fvec(rng, k));
      c.v.push_back(oracle::random_fvec(rng, k));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> widen(const std::vector<float>& x) { return {x.begin(), x.end()}; }

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0;
  size_t checked = 0;
  for (const auto& c : gradient_corpus()) {
    for (size_t i = 0; i < c.u.size(); ++i) {
      const std::span<const float> u(c.u[i]), v(c.v[i]);
      const auto cache = cosine_forward(u, v);
      const auto gu = cosine_grad_user(u, v, cache);
      const auto gv = cosine_grad_item(u, v, cache);
      const auto ud = widen(c.u[i]), vd = widen(c.v[i]);
      const auto fu = oracle::central_diff([&](const std::vector<double>& x) { return oracle::cosine(x, vd); }, ud, 1e-6);
      const auto fv = oracle::central_diff([&](const std::vector<double>& x) { return oracle::cosine(ud, x); }, vd, 1e-6);
      worst = std::max({worst, oracle::rel_err(gu, fu), oracle::rel_err(gv, fv)});
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return pass_if(worst <= 1e-4 && secs < 10.0, "max relative error " + fmt(worst, 3) + " over " +
                                                    std::to_string(checked) + " pairs at K in {2,64,128}, " +
                                                    fmt(secs, 3) + " s (limits 1e-4, 10 s)");
}

Outcome orthogonality() {
  double worst = 0;
  for (const auto& c : gradient_corpus()) {
    for (size_t i = 0; i < c.u.size(); ++i) {
      const std::span<const float> u(c.u[i]), v(c.v[i]);
      const auto cache = cosine_forward(u, v);
      const auto gu = cosine_grad_user(u, v, cache);
      const auto gv = cosine_grad_item(u, v, cache);
      const auto ud = widen(c.u[i]), vd = widen(c.v[i]);
      auto rel = [](const std::vector<double>& g, const std::vector<double>& x) {
        long double dot = 0, gg = 0, xx = 0;
        for (size_t k = 0; k < g.size(); ++k) {
          dot += static_cast<long double>(g[k]) * x[k];
          gg += static_cast<long double>(g[k]) * g[k];
          xx += static_cast<long double>(x[k]) * x[k];
        }
        const long double scale = std::sqrt(gg) * std::sqrt(xx);
        return scale > 0 ? static_cast<double>(std::abs(dot) / scale) : 0.0;
      };
      worst = std::max({worst, rel(gu, ud), rel(gv, vd)});
    }
  }
  return pass_if(worst <= 1e-6, "max |g.x| / (|g||x|) = " + fmt(worst, 3) + " (limit 1e-6)");
}

Outcome loss_kernel() {
  Rng rng(77);
  const double step = 1e-6;
  double worst_value = 0, worst_grad = 0;
  for (int i = 0; i < 10000; ++i) {
    const LossParams p{2.0 * rng.uniform(), rng.uniform(-1, 1)};
    const double pos = rng.uniform(-1, 1);
    std::vector<double> negs(1 + rng.below(64));
    for (auto& n : negs) {
      do {
        n = rng.uniform(-1, 1);
      } while (std::abs(n - p.theta) < 100 * step);
    }
    worst_value = std::max(worst_value, std::abs(ccl_loss(pos, negs, p) - oracle::ccl_loss(pos, negs, p.mu, p.theta)));
    const auto g = ccl_loss_grad(pos, negs, p);
    const double fd_pos = (oracle::ccl_loss(pos + step, negs, p.mu, p.theta) -
                           oracle::ccl_loss(pos - step, negs, p.mu, p.theta)) / (2 * step);
    worst_grad = std::max(worst_grad, std::abs(g.dpos - fd_pos));
    for (size_t j = 0; j < negs.size(); ++j) {
      auto hi = negs, lo = negs;
      hi[j] += step;
      lo[j] -= step;
      const double fd = (oracle::ccl_loss(pos, hi, p.mu, p.theta) - oracle::ccl_loss(pos, lo, p.mu, p.theta)) / (2 * step);
      worst_grad = std::max(worst_grad, std::abs(g.dnegs[j] - fd));
    }
  }
  return pass_if(worst_value <= 1e-5 && worst_grad <= 1e-5,
                 "10000 inputs: max |loss - ref| " + fmt(worst_value, 3) + ", max |grad - fd| " + fmt(worst_grad, 3) +
                     " (limit 1e-5)");
}

// ---------------------------------------------------------------- evaluator

Outcome oracle_equivalence() {
  size_t mismatches = 0, users = 0;
  for (uint64_t inst = 0; inst < 50; ++inst) {
    Rng rng(1000 + inst);
    SyntheticSpec spec;
    spec.num_users = 5 + rng.below(16);
    spec.num_items = 60 + rng.below(441);
    spec.mean_degree = 4 + rng.below(20);
    spec.num_clusters = 1 + rng.below(6);
    spec.seed = inst + 1;
    const auto data = make_synthetic(spec);
    const size_t dim = 4 + rng.below(29);
    EmbeddingMatrix u(data.train.num_users(), dim), it(data.train.num_items(), dim);
    for (auto& x : u.values()) x = static_cast<float>(rng.normal());
    for (auto& x : it.values()) x = static_cast<float>(rng.normal());
    // Every fifth instance duplicates item rows so that exact ties occur.
    if (inst % 5 == 0) {
      for (size_t i = 1; i < it.rows(); i += 3) std::copy(it.row(i - 1).begin(), it.row(i - 1).end(), it.row(i).begin());
    }
    for (bool cosine : {true, false}) {
      EvalOptions opts;
      opts.similarity = cosine ? Similarity::kCosine : Similarity::kDot;
      opts.num_threads = 1 + inst % 4;
      const auto got = evaluate(u, it, data.train, data.test, opts);
      const auto want = oracle::brute_force_metrics(u, it, data.train, data.test, 20, cosine);
      mismatches += got.recall != want.recall || got.ndcg != want.ndcg;
      users += got.users_evaluated;
    }
  }
  return pass_if(mismatches == 0, "50 instances x {cosine, dot}, " + std::to_string(users) +
                                      " user evaluations, mismatches " + std::to_string(mismatches));
}

// ---------------------------------------------------------------- Algorithm 1

Outcome tiling_arithmetic() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };

  {  // 1: tile size from a 32 MiB L2 shared by 128 threads at K=128.
    TuneInputs in;
    in.num_items = 1e6;
    in.total_iterations = 1e9;
    in.num_threads = 128;
    in.l2_bytes = 32.0 * (1 << 20);
    in.l3_bytes = 64.0 * (1 << 20);
    check(tile_size_for_cache(in.l2_bytes, 128, 128) == 256, "set1 f0");
    check(tune_tiling(in).n1 == 256, "set1 n1");
  }
  {  // 2: space-bound interval.
    TuneInputs in;
    in.num_items = 1e6;
    in.total_iterations = 1e5;
    in.l2_bytes = 1 << 20;
    in.expected_speedup = 2;
    const auto c = tune_tiling(in);
    check(c.n1 == 1024, "set2 n1");
    check(near(c.n2_by_space, 102.4), "set2 N20");
    check(near(c.n2_by_speedup, 1024.0 / 1.7), "set2 N21");
    check(c.n2 == 102, "set2 n2");
  }
  {  // 3: speedup-bound interval, Gowalla-sized universe, one thread, 2 MiB L2.
    TuneInputs in;
    in.num_items = 40981;
    in.total_iterations = 810128.0 * 100;
    in.expected_speedup = 1.5;
    const auto c = tune_tiling(in);
    check(c.n1 == 2048, "set3 n1");
    check(near(c.n2_by_speedup, 2048 / 1.275), "set3 N21");
    check(c.n2 == 1606, "set3 n2");
    const auto e = estimate_speedup(in, c.n1, c.n2);
    check(e.tier == CacheTier::kL2, "set3 tier");
    check(near(e.neg_speedup, 1606.0 * 100 / (1606.0 * 5 + 2048.0 * 95)), "set3 neg_speedup");
  }
  {  // 4: negative speedup at n1=1024, n2=4096 from L2.
    TuneInputs in;
    in.num_items = 1e5;
    in.total_iterations = 4096.0 * 1000;
    const auto e = estimate_speedup(in, 1024, 4096);
    check(e.tier == CacheTier::kL2, "set4 tier");
    check(near(e.neg_speedup, 100.0 / 28.75), "set4 neg_speedup");
    check(e.pos_speedup == 1.0, "set4 pos_speedup");
  }
  {  // 5: tile in memory tier (no gain) and positive hit ratio 0.4 from L3.
    TuneInputs in;
    in.num_items = 1e5;
    in.total_iterations = 1e6;
    in.l2_bytes = 1 << 16;
    in.l3_bytes = 1 << 18;
    in.positive_hit_ratio = 0.4;
    const auto mem = estimate_speedup(in, 1024, 1024);
    check(mem.tier == CacheTier::kMemory && mem.neg_speedup == 1.0, "set5 memory tier");
    const auto l3 = estimate_speedup(in, 256, 1024);  // 128 KiB tile
    check(l3.tier == CacheTier::kL3, "set5 tier");
    check(near(l3.neg_speedup, 100.0 / (20.0 * 768 / 1024 + 100.0 * 256 / 1024)), "set5 neg_speedup");
    check(near(l3.pos_speedup, 100.0 / (0.4 * 20 + 0.6 * 100)), "set5 pos_speedup");
  }
  std::string detail = "5 input sets";
  if (!failures.empty()) {
    detail += ", mismatches:";
    for (const auto& f : failures) detail += " " + f;
  } else {
    detail += ", all integer results exact and floats within 1e-9";
  }
  return pass_if(failures.empty(), detail);
}

// ---------------------------------------------------------------- determinism

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "heat_accept_determinism";
  fs::remove_all(root);
  SyntheticSpec spec;
  spec.num_users = 400;
  spec.num_items = 700;
  const auto data = make_synthetic(spec);
  size_t identical = 0, configs = 0;
  for (auto kind : {SamplerKind::kUniform, SamplerKind::kTiling}) {
    for (bool agg : {false, true}) {
      TrainingConfig cfg;
      cfg.emb_dim = 32;
      cfg.num_negatives = 16;
      cfg.epochs = 3;
      cfg.seed = 42;
      cfg.sampler.kind = kind;
      cfg.sampler.tile_size = 64;
      cfg.sampler.refresh_interval = 100;
      cfg.aggregator.enabled = agg;
      std::vector<std::string> files;
      for (int run = 0; run < 2; ++run) {
        InitSpec init;
        init.seed = 42;
        auto model = init_model(data.train.num_users(), data.train.num_items(), cfg, init);
        TrainOptions opts;
        opts.checkpoint_dir = root / (std::to_string(configs) + "_" + std::to_string(run));
        train(model, data.train, data.test, cfg, opts);
        files.push_back(file_bytes(opts.checkpoint_dir / "final.ckpt"));
      }
      identical += !files[0].empty() && files[0] == files[1];
      ++configs;
    }
  }

  Rng rng(5);
  size_t round_trips = 0;
  for (int i = 0; i < 25; ++i) {
    EmbeddingMatrix m(1 + rng.below(50), 1 + rng.below(64));
    for (auto& x : m.values()) x = static_cast<float>(rng.normal() * std::exp2(rng.uniform(-60, 60)));
    save_checkpoint(m, root / "rt.bin");
    const auto back = load_checkpoint(root / "rt.bin");
    save_checkpoint(back, root / "rt2.bin");
    round_trips += back.bit_equal(m) && file_bytes(root / "rt.bin") == file_bytes(root / "rt2.bin");
  }
  fs::remove_all(root);
  return pass_if(identical == configs && round_trips == 25,
                 std::to_string(identical) + "/" + std::to_string(configs) +
                     " sampler/aggregator configs give byte-identical checkpoints; " + std::to_string(round_trips) +
                     "/25 round trips bit-exact");
}

// ---------------------------------------------------------------- bench

Outcome read_speedup() {
  // Gowalla-shaped item universe; interactions synthetic.
  app::KeyValues kv = app::default_config();
  kv["data.source"] = "synthetic";
  kv["synthetic.users"] = "29858";
  kv["synthetic.items"] = "40981";
  kv["synthetic.degree"] = "8";
  kv["model.dim"] = "128";
  kv["train.negatives"] = "64";
  kv["train.threads"] = "1";
  kv["sampler.tile"] = "1024";
  kv["sampler.interval"] = "4096";
  kv["bench.threads"] = "1";
  kv["bench.samplers"] = "uniform,tiling";
  kv["bench.warmup_epochs"] = "1";
  kv["bench.epochs"] = "2";
  const auto rc = app::to_run_config(kv);
  const auto data = app::load_dataset(rc, false);
  std::vector<double> ratios;
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& row : app::run_bench(rc, data.train)) {
      if (row.sampler == SamplerKind::kTiling) ratios.push_back(row.read_speedup);
    }
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios[ratios.size() / 2];
  std::string all;
  for (double r : ratios) all += (all.empty() ? "" : ", ") + fmt(r, 3);
  return pass_if(median >= 1.2, "tile 1024, interval 4096, K=128, n=64, 29858x40981 universe: read-phase speedup median " +
                                    fmt(median, 3) + "x over 3 repeats (" + all + "), floor 1.2x");
}

// ---------------------------------------------------------------- Gowalla

fs::path gowalla_dir() {
  if (const char* env = std::getenv("HEAT_GOWALLA_DIR"); env && *env) return env;
  return fs::path(HEAT_SOURCE_DIR) / "data" / "gowalla";
}

bool gowalla_available() {
  const auto d = gowalla_dir();
  return fs::exists(d / "train.txt") && fs::exists(d / "test.txt");
}

Outcome skip_without_gowalla() {
  return {Status::kSkip, "Gowalla split not found under " + gowalla_dir().string() +
                             " (set HEAT_GOWALLA_DIR or run scripts/fetch_gowalla.sh)"};
}

struct RunSummary {
  double recall = 0;
  double ndcg = 0;
  double epoch_seconds = 0;  // mean wall time per epoch
};

class GowallaRunner {
 public:
  GowallaRunner() {
    app::KeyValues file = app::load_ini(fs::path(HEAT_SOURCE_DIR) / "configs" / "gowalla.ini");
    file["data.train"] = (gowalla_dir() / "train.txt").string();
    file["data.test"] = (gowalla_dir() / "test.txt").string();
    base_ = app::resolve(file, {});
  }

  // Trains from scratch with `overrides` on top of configs/gowalla.ini.
  // Results are cached by resolved configuration in the build tree, since
  // several criteria share the same runs.
  RunSummary run(const app::KeyValues& overrides) {
    app::KeyValues kv = app::resolve(base_, overrides);
    const std::string ini = app::to_ini(kv);
    const fs::path cache = fs::path(HEAT_ACCEPT_CACHE) / (std::to_string(std::hash<std::string>{}(ini)) + ".json");
    if (fs::exists(cache)) {
      const auto j = nlohmann::json::parse(file_bytes(cache));
      return {j["recall"], j["ndcg"], j["epoch_seconds"]};
    }
    auto rc = app::to_run_config(kv);
    if (!data_) data_ = app::load_dataset(rc, true);
    if (rc.auto_tile) app::apply_auto_tile(rc, kv, data_->train);
    auto model = init_model(data_->train.num_users(), data_->train.num_items(), rc.training, rc.init);
    TrainOptions opts;
    opts.k = 20;
    opts.on_epoch = [&](const EpochReport& r) {
      std::cerr << "  epoch " << r.epoch + 1 << "/" << rc.training.epochs << " loss " << r.mean_loss << " "
                << fmt(r.wall_seconds, 3) << " s\n";
    };
    const auto res = train(model, data_->train, data_->test, rc.training, opts);
    RunSummary s{res.final_metrics.recall, res.final_metrics.ndcg, 0};
    for (const auto& e : res.epochs) s.epoch_seconds += e.wall_seconds;
    if (!res.epochs.empty()) s.epoch_seconds /= static_cast<double>(res.epochs.size());
    fs::create_directories(cache.parent_path());
    std::ofstream(cache) << nlohmann::json{{"recall", s.recall}, {"ndcg", s.ndcg}, {"epoch_seconds", s.epoch_seconds},
                                           {"config", ini}}
                                .dump()
                         << '\n';
    return s;
  }

  // Mean epoch time over `epochs` fresh epochs (no evaluation, not cached).
  double epoch_time(const app::KeyValues& overrides, size_t epochs) {
    app::KeyValues kv = app::resolve(base_, overrides);
    auto rc = app::to_run_config(kv);
    if (!data_) data_ = app::load_dataset(rc, true);
    auto model = init_model(data_->train.num_users(), data_->train.num_items(), rc.training, rc.init);
    std::optional<AggregatorWeights> w;
    if (rc.training.aggregator.enabled) w = AggregatorWeights::xavier(rc.training.emb_dim, rc.training.seed);
    double total = 0;
    for (size_t e = 0; e < epochs; ++e)
      total += train_epoch(model.users, model.items, data_->train, rc.training, w ? &*w : nullptr, e).wall_seconds;
    return total / static_cast<double>(epochs);
  }

 private:
  app::KeyValues base_;
  std::optional<app::Dataset> data_;
};

constexpr const char* kParallelThreads = "8";

Outcome accuracy_reproduction() {
  if (!gowalla_available()) return skip_without_gowalla();
  GowallaRunner g;
  const auto plain = g.run({{"train.threads", kParallelThreads}});
  const auto agg = g.run({{"train.threads", kParallelThreads}, {"aggregator.enabled", "on"}});
  return pass_if(plain.recall >= 0.16 && agg.recall >= 0.165,
                 "Recall@20 " + fmt(plain.recall) + " (floor 0.16), with aggregator " + fmt(agg.recall) + " (floor 0.165)");
}

Outcome tiling_accuracy_cost() {
  if (!gowalla_available()) return skip_without_gowalla();
  GowallaRunner g;
  const auto uniform = g.run({{"train.threads", kParallelThreads}});
  const auto tiled = g.run({{"train.threads", kParallelThreads},
                            {"sampler.kind", "tiling"},
                            {"sampler.tile", "auto"},
                            {"tune.expected_speedup", "1.5"}});
  const double drop = uniform.recall - tiled.recall;
  return pass_if(drop <= 0.01, "uniform " + fmt(uniform.recall) + ", tiling (tuned, P=1.5) " + fmt(tiled.recall) +
                                   ", drop " + fmt(drop, 3) + " (limit 0.01)");
}

Outcome hogwild_parity() {
  if (!gowalla_available()) return skip_without_gowalla();
  GowallaRunner g;
  const auto one = g.run({{"train.threads", "1"}});
  const auto many = g.run({{"train.threads", kParallelThreads}});
  const double diff = std::abs(one.recall - many.recall);
  return pass_if(diff <= 0.01, "Recall@20 1 thread " + fmt(one.recall) + ", 8 threads " + fmt(many.recall) +
                                   ", |diff| " + fmt(diff, 3) + " (limit 0.01)");
}

Outcome scalability() {
  if (!gowalla_available()) return skip_without_gowalla();
  GowallaRunner g;
  const double t1 = g.epoch_time({{"train.threads", "1"}}, 2);
  const double t8 = g.epoch_time({{"train.threads", kParallelThreads}}, 2);
  const double eff = t1 / (8.0 * t8);
  return pass_if(eff >= 0.5, "epoch " + fmt(t1, 3) + " s at 1 thread, " + fmt(t8, 3) + " s at 8 threads, efficiency " +
                                 fmt(100 * eff, 3) + "% (floor 50%), hardware threads " +
                                 std::to_string(std::thread::hardware_concurrency()));
}

Outcome aggregator_accumulation() {
  if (!gowalla_available()) return skip_without_gowalla();
  GowallaRunner g;
  const app::KeyValues common{{"train.threads", kParallelThreads}, {"aggregator.enabled", "on"}};
  auto with = [&](const char* m) {
    auto kv = common;
    kv["aggregator.mini_batch"] = m;
    return g.run(kv);
  };
  const auto local = with("32");
  const auto shared = with("1");
  const double diff = std::abs(local.recall - shared.recall);
  const double speedup = shared.epoch_seconds / local.epoch_seconds;
  return pass_if(diff <= 0.005 && speedup >= 1.2,
                 "Recall@20 m=32 " + fmt(local.recall) + ", m=1 " + fmt(shared.recall) + ", |diff| " + fmt(diff, 3) +
                     " (limit 0.005); epoch time m=1/m=32 " + fmt(speedup, 3) + "x at 8 threads (floor 1.2x)");
}

// ---------------------------------------------------------------- driver

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "gradient correctness", gradient_correctness},
      {2, "gradient orthogonality", orthogonality},
      {3, "loss kernel", loss_kernel},
      {4, "evaluator oracle equivalence", oracle_equivalence},
      {5, "Gowalla accuracy", accuracy_reproduction},
      {6, "tiling accuracy cost", tiling_accuracy_cost},
      {7, "tiling read speedup", read_speedup},
      {8, "Hogwild parity", hogwild_parity},
      {9, "thread scalability", scalability},
      {10, "aggregator local accumulation", aggregator_accumulation},
      {11, "tiling tuner arithmetic", tiling_arithmetic},
      {12, "determinism", determinism},
  };
  return all;
}

int run(const std::vector<int>& ids) {
  bool failed = false, skipped = false;
  for (const auto& c : criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("error: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    std::cout << "[" << tag << "] C" << c.id << " " << c.name << ": " << o.detail << std::endl;
    failed |= o.status == Status::kFail;
    skipped |= o.status == Status::kSkip;
  }
  if (failed) return 1;
  // A lone skipped criterion reports ctest's skip code.
  if (skipped && ids.size() == 1) return 77;
  return 0;
}

}  // namespace
}  // namespace heat::acceptance

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> ids;
  app.add_option("-c,--criterion", ids, "Criterion number(s); default all")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);
  return heat::acceptance::run(ids);
}
