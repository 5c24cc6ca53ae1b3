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

#include "heat/app/commands.h"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "heat/app/manifest.h"
#include "heat/evaluator.h"
#include "heat/sampler.h"
#include "heat/synthetic.h"
#include "json.hpp"

namespace heat::app {

namespace {

InteractionSet load_split(const std::filesystem::path& path, InteractionFormat format) {
  if (path.empty() || !std::filesystem::exists(path)) throw UsageError("dataset not found: " + path.string());
  return parse_interactions(path, format);
}

std::string sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kTiling: return "tiling";
    case SamplerKind::kFixed: return "fixed";
    default: return "uniform";
  }
}

std::string phases_json(const EpochReport& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch + 1;
  j["loss"] = r.mean_loss;
  j["wall_s"] = r.wall_seconds;
  j["read_emb_s"] = r.phases.read_emb;
  j["similarity_s"] = r.phases.similarity;
  j["loss_s"] = r.phases.loss;
  j["gradient_s"] = r.phases.gradient;
  j["update_s"] = r.phases.update;
  j["aggregate_s"] = r.phases.aggregate;
  j["degenerate"] = r.degenerate_count;
  j["pairs"] = r.pairs;
  return j.dump();
}

TuneInputs tune_inputs_for(const RunConfig& rc, const InteractionSet& train, size_t threads) {
  TuneInputs in = rc.tune.inputs;
  const size_t epochs = rc.tune.planned_epochs ? rc.tune.planned_epochs : rc.training.epochs;
  in.num_items = static_cast<double>(train.num_items());
  in.total_iterations = static_cast<double>(train.num_interactions()) * static_cast<double>(std::max<size_t>(1, epochs));
  in.num_threads = threads;
  return in;
}

}  // namespace

Dataset load_dataset(const RunConfig& rc, bool need_test) {
  Dataset d;
  if (rc.synthetic) {
    auto s = make_synthetic(rc.synthetic_spec);
    d.train = std::move(s.train);
    d.test = std::move(s.test);
    return d;
  }
  d.train = load_split(rc.train_path, rc.format);
  if (need_test || !rc.test_path.empty()) d.test = load_split(rc.test_path, rc.format);
  align_universes(d.train, d.test);
  return d;
}

void apply_auto_tile(RunConfig& rc, KeyValues& resolved, const InteractionSet& train) {
  if (!rc.auto_tile) return;
  const auto choice = tune_tiling(tune_inputs_for(rc, train, rc.training.num_threads));
  rc.training.sampler.tile_size = choice.n1;
  rc.training.sampler.refresh_interval = choice.n2;
  resolved["sampler.tile"] = std::to_string(choice.n1);
  resolved["sampler.interval"] = std::to_string(choice.n2);
}

int cmd_train(RunConfig rc, KeyValues resolved, std::ostream& out, std::ostream& err) {
  Dataset data = load_dataset(rc, true);
  apply_auto_tile(rc, resolved, data.train);

  ModelState model;
  if (!rc.resume.empty()) {
    try {
      model = load_model(rc.resume);
    } catch (const CorruptCheckpoint& e) {
      throw UsageError("bad checkpoint " + rc.resume.string() + ": " + e.what());
    }
    if (model.users.rows() < data.train.num_users() || model.items.rows() < data.train.num_items() ||
        model.users.dim() != rc.training.emb_dim) {
      throw UsageError("checkpoint shape does not match dataset/config");
    }
  } else {
    model = init_model(data.train.num_users(), data.train.num_items(), rc.training, rc.init);
  }

  std::filesystem::create_directories(rc.out_dir);
  {
    std::ofstream manifest(rc.out_dir / "manifest.json");
    manifest << make_manifest("train", resolved, rc) << '\n';
    std::ofstream cfg(rc.out_dir / "config.ini");
    cfg << to_ini(resolved);
  }
  std::ofstream metrics(rc.out_dir / "metrics.jsonl", std::ios::trunc);
  std::ofstream epochs(rc.out_dir / "epochs.jsonl", std::ios::trunc);

  TrainOptions opts;
  opts.eval_interval = rc.eval_interval;
  opts.k = rc.k;
  opts.eval_threads = rc.eval_threads;
  if (rc.checkpoints) opts.checkpoint_dir = rc.out_dir;
  opts.on_epoch = [&](const EpochReport& r) {
    epochs << phases_json(r) << '\n';
    err << "epoch " << r.epoch + 1 << "/" << rc.training.epochs << " loss " << r.mean_loss << " (" << std::fixed
        << std::setprecision(2) << r.wall_seconds << "s)" << std::defaultfloat << std::setprecision(6) << '\n';
  };
  opts.on_eval = [&](long epoch, const MetricsReport& m) {
    const auto line = metrics_json(m, epoch);
    metrics << line << '\n';
    out << line << '\n';
  };
  const auto result = train(model, data.train, data.test, rc.training, opts);
  const auto line = metrics_json(result.final_metrics, model.epochs_done);
  metrics << line << '\n';
  out << line << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& rc, const std::filesystem::path& checkpoint, std::ostream& out, std::ostream&) {
  ModelState model;
  try {
    model = load_model(checkpoint);
  } catch (const CorruptCheckpoint& e) {
    throw UsageError("bad checkpoint " + checkpoint.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  Dataset data = load_dataset(rc, true);
  if (model.users.rows() < data.test.num_users() || model.items.rows() < data.test.num_items()) {
    throw UsageError("checkpoint is smaller than the dataset universe");
  }
  EvalOptions opts;
  opts.k = rc.k;
  opts.similarity = rc.training.similarity;
  opts.num_threads = rc.eval_threads ? rc.eval_threads : rc.training.num_threads;
  std::optional<AggregatorWeights> weights;
  if (model.aggregator) {
    weights.emplace(*model.aggregator);
    opts.aggregator = &*weights;
    opts.aggregator_cfg = rc.training.aggregator;
    opts.aggregator_cfg.enabled = true;
  }
  const auto m = evaluate(model.users, model.items, data.train, data.test, opts);
  out << metrics_json(m, model.epochs_done) << '\n';
  return kExitOk;
}

int cmd_tune(const RunConfig& rc, const KeyValues& resolved, const std::filesystem::path& write_back,
             std::ostream& out, std::ostream&) {
  TuneInputs in = rc.tune.inputs;
  if (!rc.synthetic && !rc.train_path.empty()) {
    const auto train = load_split(rc.train_path, rc.format);
    in = tune_inputs_for(rc, train, rc.training.num_threads);
  }
  try {
    in.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto choice = tune_tiling(in);
  const auto est = estimate_speedup(in, choice.n1, choice.n2);
  nlohmann::ordered_json j;
  j["n1"] = choice.n1;
  j["n2"] = choice.n2;
  j["neg_speedup"] = est.neg_speedup;
  j["pos_speedup"] = est.pos_speedup;
  j["tier"] = to_string(est.tier);
  j["alpha"] = est.alpha;
  j["beta"] = est.beta;
  j["tile_bytes"] = est.tile_bytes;
  j["n2_by_space"] = choice.n2_by_space;
  j["n2_by_speedup"] = choice.n2_by_speedup;
  out << j.dump() << '\n';

  if (!write_back.empty()) {
    KeyValues updated = resolved;
    updated["sampler.kind"] = "tiling";
    updated["sampler.tile"] = std::to_string(choice.n1);
    updated["sampler.interval"] = std::to_string(choice.n2);
    std::ofstream f(write_back);
    if (!f) throw std::runtime_error("cannot write " + write_back.string());
    f << to_ini(updated);
  }
  return kExitOk;
}

std::vector<BenchRow> run_bench(const RunConfig& rc, const InteractionSet& train) {
  std::vector<BenchRow> rows;
  for (bool agg : rc.bench.aggregator) {
    const std::vector<size_t> mbs = agg ? rc.bench.mini_batches : std::vector<size_t>{0};
    for (size_t mb : mbs) {
      for (SamplerKind sk : rc.bench.samplers) {
        for (size_t threads : rc.bench.threads) {
          TrainingConfig cfg = rc.training;
          cfg.num_threads = threads;
          cfg.profile_phases = true;
          cfg.sampler.kind = sk;
          cfg.aggregator.enabled = agg;
          if (agg) cfg.aggregator.mini_batch = mb;
          if (sk == SamplerKind::kTiling && rc.auto_tile) {
            const auto choice = tune_tiling(tune_inputs_for(rc, train, threads));
            cfg.sampler.tile_size = choice.n1;
            cfg.sampler.refresh_interval = choice.n2;
          }
          ModelState model = init_model(train.num_users(), train.num_items(), cfg, rc.init);
          std::optional<AggregatorWeights> w;
          if (agg) w.emplace(*model.aggregator);

          BenchRow row;
          row.threads = threads;
          row.sampler = sk;
          row.tile = sk == SamplerKind::kTiling ? cfg.sampler.tile_size : 0;
          row.interval = sk == SamplerKind::kTiling ? cfg.sampler.refresh_interval : 0;
          row.aggregator = agg;
          row.mini_batch = mb;
          row.epochs = rc.bench.epochs;
          const size_t total = rc.bench.warmup_epochs + rc.bench.epochs;
          for (size_t e = 0; e < total; ++e) {
            const auto r = train_epoch(model.users, model.items, train, cfg, w ? &*w : nullptr, e);
            if (e < rc.bench.warmup_epochs) continue;
            row.epoch_seconds += r.wall_seconds;
            row.phases += r.phases;
            row.mean_loss += r.mean_loss;
          }
          const double inv = 1.0 / static_cast<double>(rc.bench.epochs);
          row.epoch_seconds *= inv;
          row.phases = row.phases.scaled(inv);
          row.mean_loss *= inv;
          rows.push_back(row);
        }
      }
    }
  }

  // Relative numbers. Setups are keyed by (aggregator, mini_batch, sampler).
  auto same_setup = [](const BenchRow& a, const BenchRow& b) {
    return a.aggregator == b.aggregator && a.mini_batch == b.mini_batch && a.sampler == b.sampler;
  };
  for (auto& row : rows) {
    const BenchRow* base = nullptr;
    const BenchRow* prev = nullptr;
    for (const auto& o : rows) {
      if (!same_setup(o, row)) continue;
      if (!base || o.threads < base->threads) base = &o;
      if (o.threads < row.threads && (!prev || o.threads > prev->threads)) prev = &o;
    }
    row.speedup = base->epoch_seconds / row.epoch_seconds;
    if (prev && row.epoch_seconds > prev->epoch_seconds) {
      row.note = "non-monotone: slower than " + std::to_string(prev->threads) + " threads";
    }
    if (row.sampler == SamplerKind::kTiling) {
      for (const auto& o : rows) {
        if (o.sampler == SamplerKind::kUniform && o.threads == row.threads && o.aggregator == row.aggregator &&
            o.mini_batch == row.mini_batch && row.phases.read_emb > 0) {
          row.read_speedup = o.phases.read_emb / row.phases.read_emb;
        }
      }
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "threads,sampler,tile,interval,aggregator,mini_batch,epochs,epoch_s,read_emb_s,similarity_s,loss_s,"
         "gradient_s,update_s,aggregate_s,mean_loss,speedup,read_speedup,note";
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << bench_csv_header() << '\n';
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.threads << ',' << sampler_name(r.sampler) << ',' << r.tile << ',' << r.interval << ','
        << (r.aggregator ? "on" : "off") << ',' << r.mini_batch << ',' << r.epochs << ',' << r.epoch_seconds << ','
        << r.phases.read_emb << ',' << r.phases.similarity << ',' << r.phases.loss << ',' << r.phases.gradient << ','
        << r.phases.update << ',' << r.phases.aggregate << ',' << r.mean_loss << ',' << r.speedup << ','
        << r.read_speedup << ',' << r.note << '\n';
  }
}

int cmd_bench(RunConfig rc, KeyValues resolved, std::ostream& out, std::ostream&) {
  Dataset data = load_dataset(rc, false);
  const auto rows = run_bench(rc, data.train);
  write_bench_csv(rows, out);
  if (!rc.out_dir.empty()) {
    std::filesystem::create_directories(rc.out_dir);
    std::ofstream csv(rc.out_dir / "bench.csv");
    write_bench_csv(rows, csv);
    std::ofstream manifest(rc.out_dir / "manifest.json");
    manifest << make_manifest("bench", resolved, rc) << '\n';
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-core matrix-factorization trainer with cosine contrastive loss"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "INI config file");
    sub->add_option("--set", sets, "Override any key: section.key=value")->take_all();
    auto bind = [&](const std::string& flag, const std::string& key, const std::string& help) {
      sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    bind("--train", "data.train", "Train interactions file");
    bind("--test", "data.test", "Test interactions file");
    bind("--format", "data.format", "adjacency|pairs");
    bind("--out", "output.dir", "Output directory");
    bind("--threads", "train.threads", "Trainer threads (overrides HEAT_THREADS)");
    bind("--seed", "train.seed", "Random seed");
    bind("--epochs", "train.epochs", "Epochs");
    bind("--lr", "train.lr", "Learning rate");
    bind("--dim", "model.dim", "Embedding dimension");
    bind("--negatives", "train.negatives", "Negatives per pair");
    bind("--sampler", "sampler.kind", "uniform|tiling");
    bind("--tile", "sampler.tile", "Tile size n1, or auto");
    bind("--interval", "sampler.interval", "Tile refresh interval n2");
    bind("--aggregator", "aggregator.enabled", "on|off");
    bind("--k", "eval.k", "Cutoff for Recall/NDCG");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd);
  train_cmd->add_option_function<std::string>(
      "--resume", [&flags](const std::string& v) { flags["output.resume"] = v; }, "Resume from a model checkpoint");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd);
  std::string checkpoint;
  eval_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();

  auto* tune_cmd = app.add_subcommand("tune", "Choose tile size and refresh interval");
  add_common(tune_cmd);
  tune_cmd->add_option_function<std::string>(
      "-P,--expected-speedup", [&flags](const std::string& v) { flags["tune.expected_speedup"] = v; },
      "Expected read speedup P");
  std::string write_back;
  tune_cmd->add_option("--write", write_back, "Write a config with the chosen values");

  auto* bench_cmd = app.add_subcommand("bench", "Per-phase timing across configurations");
  add_common(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const KeyValues file = config_path.empty() ? KeyValues{} : load_ini(config_path);
    KeyValues overrides;
    if (const char* env = std::getenv("HEAT_THREADS"); env != nullptr && *env != '\0') {
      overrides["train.threads"] = env;
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : flags) overrides[k] = v;
    KeyValues resolved = resolve(file, overrides);
    RunConfig rc = to_run_config(resolved);

    if (*train_cmd) return cmd_train(std::move(rc), std::move(resolved), out, err);
    if (*eval_cmd) return cmd_eval(rc, checkpoint, out, err);
    if (*tune_cmd) return cmd_tune(rc, resolved, write_back, out, err);
    if (*bench_cmd) return cmd_bench(std::move(rc), std::move(resolved), out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace heat::app
