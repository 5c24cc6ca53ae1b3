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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <vector>

#include "heat/aggregator.h"
#include "heat/app/commands.h"
#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/evaluator.h"
#include "heat/kernels.h"
#include "heat/sampler.h"
#include "heat/synthetic.h"
#include "heat/trainer.h"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

heat::EmbeddingMatrix to_matrix(const FloatArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d float array");
  const auto rows = static_cast<size_t>(a.shape(0));
  const auto dim = static_cast<size_t>(a.shape(1));
  return heat::EmbeddingMatrix(rows, dim, std::vector<float>(a.data(), a.data() + rows * dim));
}

FloatArray to_array(const heat::EmbeddingMatrix& m) {
  FloatArray out({m.rows(), m.dim()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

std::span<const double> as_span(const DoubleArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return {a.data(), static_cast<size_t>(a.shape(0))};
}

DoubleArray to_array(const std::vector<double>& v) {
  DoubleArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

void check_same_size(const DoubleArray& u, const DoubleArray& v) {
  if (u.ndim() != 1 || v.ndim() != 1 || u.shape(0) != v.shape(0)) {
    throw std::invalid_argument("vectors must be 1-d and of equal length");
  }
}

py::dict metrics_dict(const heat::MetricsReport& m) {
  py::dict d;
  d["recall"] = m.recall;
  d["ndcg"] = m.ndcg;
  d["k"] = m.k;
  d["users"] = m.users_evaluated;
  return d;
}

}  // namespace

PYBIND11_MODULE(_heat, m) {
  m.doc() = "Multi-core matrix-factorization trainer with cosine contrastive loss";

  py::register_exception<heat::CorruptCheckpoint>(m, "CorruptCheckpoint", PyExc_ValueError);
  py::register_exception<heat::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<heat::EmptyTestSet>(m, "EmptyTestSet", PyExc_ValueError);

  py::enum_<heat::Similarity>(m, "Similarity")
      .value("COSINE", heat::Similarity::kCosine)
      .value("DOT", heat::Similarity::kDot);
  py::enum_<heat::SamplerKind>(m, "SamplerKind")
      .value("UNIFORM", heat::SamplerKind::kUniform)
      .value("TILING", heat::SamplerKind::kTiling)
      .value("FIXED", heat::SamplerKind::kFixed);
  py::enum_<heat::InteractionFormat>(m, "InteractionFormat")
      .value("ADJACENCY", heat::InteractionFormat::kAdjacency)
      .value("PAIRS", heat::InteractionFormat::kPairs);

  // Kernels on float64 vectors.
  m.def(
      "cosine_forward",
      [](const DoubleArray& u, const DoubleArray& v) {
        check_same_size(u, v);
        const auto c = heat::cosine_forward(as_span(u), as_span(v));
        return py::dict(py::arg("sim") = c.sim, py::arg("ss") = c.ss, py::arg("tt") = c.tt, py::arg("st") = c.st,
                        py::arg("degenerate") = c.degenerate);
      },
      py::arg("u"), py::arg("v"));
  m.def(
      "cosine_grad_user",
      [](const DoubleArray& u, const DoubleArray& v) {
        check_same_size(u, v);
        return to_array(heat::cosine_grad_user_recomputed(as_span(u), as_span(v)));
      },
      py::arg("u"), py::arg("v"));
  m.def(
      "cosine_grad_item",
      [](const DoubleArray& u, const DoubleArray& v) {
        check_same_size(u, v);
        return to_array(heat::cosine_grad_item_recomputed(as_span(u), as_span(v)));
      },
      py::arg("u"), py::arg("v"));
  m.def(
      "ccl_loss",
      [](double pos, const std::vector<double>& negs, double mu, double theta) {
        return heat::ccl_loss(pos, negs, heat::LossParams{mu, theta});
      },
      py::arg("sim_pos"), py::arg("sim_negs"), py::arg("mu") = 1.0, py::arg("theta") = 0.8);
  m.def(
      "ccl_loss_grad",
      [](double pos, const std::vector<double>& negs, double mu, double theta) {
        const auto g = heat::ccl_loss_grad(pos, negs, heat::LossParams{mu, theta});
        return py::make_tuple(g.dpos, g.dnegs);
      },
      py::arg("sim_pos"), py::arg("sim_negs"), py::arg("mu") = 1.0, py::arg("theta") = 0.8);

  // Tiling model.
  py::class_<heat::TuneInputs>(m, "TuneInputs")
      .def(py::init<>())
      .def_readwrite("num_items", &heat::TuneInputs::num_items)
      .def_readwrite("total_iterations", &heat::TuneInputs::total_iterations)
      .def_readwrite("num_negatives", &heat::TuneInputs::num_negatives)
      .def_readwrite("num_positives", &heat::TuneInputs::num_positives)
      .def_readwrite("positive_hit_ratio", &heat::TuneInputs::positive_hit_ratio)
      .def_readwrite("l2_bytes", &heat::TuneInputs::l2_bytes)
      .def_readwrite("l3_bytes", &heat::TuneInputs::l3_bytes)
      .def_readwrite("latency_mem", &heat::TuneInputs::latency_mem)
      .def_readwrite("latency_l2", &heat::TuneInputs::latency_l2)
      .def_readwrite("latency_l3", &heat::TuneInputs::latency_l3)
      .def_readwrite("expected_speedup", &heat::TuneInputs::expected_speedup)
      .def_readwrite("num_threads", &heat::TuneInputs::num_threads)
      .def_readwrite("emb_dim", &heat::TuneInputs::emb_dim);
  m.def("tile_size_for_cache", &heat::tile_size_for_cache, py::arg("l2_bytes"), py::arg("num_threads"),
        py::arg("emb_dim"));
  m.def(
      "tune_tiling",
      [](const heat::TuneInputs& in) {
        const auto c = heat::tune_tiling(in);
        return py::dict(py::arg("n1") = c.n1, py::arg("n2") = c.n2, py::arg("n2_by_space") = c.n2_by_space,
                        py::arg("n2_by_speedup") = c.n2_by_speedup);
      },
      py::arg("inputs"));
  m.def(
      "estimate_speedup",
      [](const heat::TuneInputs& in, size_t n1, size_t n2) {
        const auto e = heat::estimate_speedup(in, n1, n2);
        return py::dict(py::arg("neg_speedup") = e.neg_speedup, py::arg("pos_speedup") = e.pos_speedup,
                        py::arg("tier") = heat::to_string(e.tier), py::arg("alpha") = e.alpha,
                        py::arg("beta") = e.beta);
      },
      py::arg("inputs"), py::arg("n1"), py::arg("n2"));

  // Data.
  py::class_<heat::InteractionSet>(m, "InteractionSet")
      .def_static("from_lists", &heat::InteractionSet::from_lists, py::arg("lists"), py::arg("num_items") = 0)
      .def_property_readonly("num_users", &heat::InteractionSet::num_users)
      .def_property_readonly("num_items", &heat::InteractionSet::num_items)
      .def_property_readonly("num_interactions", &heat::InteractionSet::num_interactions)
      .def("items_of",
           [](const heat::InteractionSet& s, heat::UserId u) {
             if (u >= s.num_users()) throw py::index_error("user out of range");
             const auto items = s.items_of(u);
             return std::vector<heat::ItemId>(items.begin(), items.end());
           })
      .def("__len__", &heat::InteractionSet::num_interactions);
  m.def(
      "load_interactions",
      [](const std::filesystem::path& path, heat::InteractionFormat f) { return heat::parse_interactions(path, f); },
      py::arg("path"), py::arg("format") = heat::InteractionFormat::kAdjacency);
  m.def(
      "make_synthetic",
      [](size_t users, size_t items, double degree, size_t clusters, uint64_t seed) {
        heat::SyntheticSpec spec;
        spec.num_users = users;
        spec.num_items = items;
        spec.mean_degree = degree;
        spec.num_clusters = clusters;
        spec.seed = seed;
        auto d = heat::make_synthetic(spec);
        return py::make_tuple(std::move(d.train), std::move(d.test));
      },
      py::arg("num_users") = 1000, py::arg("num_items") = 2000, py::arg("mean_degree") = 20.0,
      py::arg("num_clusters") = 20, py::arg("seed") = 1);

  // Embeddings and checkpoints.
  m.def(
      "init_matrix",
      [](size_t rows, size_t dim, const std::string& kind, float mean, float std, uint64_t seed) {
        heat::InitSpec s;
        if (kind == "xavier") {
          s.kind = heat::InitSpec::Kind::kXavier;
        } else if (kind != "normal") {
          throw std::invalid_argument("kind must be 'normal' or 'xavier'");
        }
        s.mean = mean;
        s.std = std;
        s.seed = seed;
        return to_array(heat::init_matrix(rows, dim, s));
      },
      py::arg("rows"), py::arg("dim"), py::arg("kind") = "normal", py::arg("mean") = 0.0f, py::arg("std") = 0.01f,
      py::arg("seed") = 0);
  m.def(
      "save_checkpoint",
      [](const FloatArray& a, const std::filesystem::path& path) { heat::save_checkpoint(to_matrix(a), path); },
      py::arg("matrix"), py::arg("path"));
  m.def(
      "load_checkpoint", [](const std::filesystem::path& path) { return to_array(heat::load_checkpoint(path)); },
      py::arg("path"));
  m.def(
      "load_model",
      [](const std::filesystem::path& path) {
        const auto s = heat::load_model(path);
        py::dict d;
        d["users"] = to_array(s.users);
        d["items"] = to_array(s.items);
        d["aggregator"] = s.aggregator ? py::object(to_array(*s.aggregator)) : py::none();
        d["epochs_done"] = s.epochs_done;
        return d;
      },
      py::arg("path"));

  // Evaluation.
  m.def(
      "topk",
      [](const std::vector<float>& user, const FloatArray& items, size_t k, const std::vector<heat::ItemId>& exclude,
         heat::Similarity sim) {
        auto ex = exclude;
        std::sort(ex.begin(), ex.end());
        return heat::topk_items(user, to_matrix(items), ex, k, sim);
      },
      py::arg("user"), py::arg("items"), py::arg("k") = 20, py::arg("exclude") = std::vector<heat::ItemId>{},
      py::arg("similarity") = heat::Similarity::kCosine);
  m.def(
      "evaluate",
      [](const FloatArray& users, const FloatArray& items, const heat::InteractionSet& train,
         const heat::InteractionSet& test, size_t k, heat::Similarity sim, size_t threads) {
        heat::EvalOptions opts;
        opts.k = k;
        opts.similarity = sim;
        opts.num_threads = threads;
        heat::MetricsReport r;
        const auto u = to_matrix(users), i = to_matrix(items);
        {
          py::gil_scoped_release release;
          r = heat::evaluate(u, i, train, test, opts);
        }
        return metrics_dict(r);
      },
      py::arg("users"), py::arg("items"), py::arg("train"), py::arg("test"), py::arg("k") = 20,
      py::arg("similarity") = heat::Similarity::kCosine, py::arg("num_threads") = 1);

  // Training.
  py::class_<heat::TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("emb_dim", &heat::TrainingConfig::emb_dim)
      .def_readwrite("num_negatives", &heat::TrainingConfig::num_negatives)
      .def_readwrite("learning_rate", &heat::TrainingConfig::learning_rate)
      .def_readwrite("epochs", &heat::TrainingConfig::epochs)
      .def_readwrite("num_threads", &heat::TrainingConfig::num_threads)
      .def_readwrite("similarity", &heat::TrainingConfig::similarity)
      .def_readwrite("seed", &heat::TrainingConfig::seed)
      .def_readwrite("l2_reg", &heat::TrainingConfig::l2_reg)
      .def_property(
          "mu", [](const heat::TrainingConfig& c) { return c.loss.mu; },
          [](heat::TrainingConfig& c, double v) { c.loss.mu = v; })
      .def_property(
          "theta", [](const heat::TrainingConfig& c) { return c.loss.theta; },
          [](heat::TrainingConfig& c, double v) { c.loss.theta = v; })
      .def_property(
          "sampler", [](const heat::TrainingConfig& c) { return c.sampler.kind; },
          [](heat::TrainingConfig& c, heat::SamplerKind k) { c.sampler.kind = k; })
      .def_property(
          "tile_size", [](const heat::TrainingConfig& c) { return c.sampler.tile_size; },
          [](heat::TrainingConfig& c, size_t v) { c.sampler.tile_size = v; })
      .def_property(
          "refresh_interval", [](const heat::TrainingConfig& c) { return c.sampler.refresh_interval; },
          [](heat::TrainingConfig& c, size_t v) { c.sampler.refresh_interval = v; })
      .def_property(
          "aggregator", [](const heat::TrainingConfig& c) { return c.aggregator.enabled; },
          [](heat::TrainingConfig& c, bool v) { c.aggregator.enabled = v; })
      .def_property(
          "gamma", [](const heat::TrainingConfig& c) { return c.aggregator.gamma; },
          [](heat::TrainingConfig& c, double v) { c.aggregator.gamma = v; })
      .def_property(
          "mini_batch", [](const heat::TrainingConfig& c) { return c.aggregator.mini_batch; },
          [](heat::TrainingConfig& c, size_t v) { c.aggregator.mini_batch = v; });

  m.def(
      "train",
      [](const heat::InteractionSet& train_set, const heat::InteractionSet& test_set, const heat::TrainingConfig& cfg,
         size_t eval_interval, float init_std, py::object on_eval) {
        heat::InitSpec init;
        init.std = init_std;
        init.seed = cfg.seed;
        auto model = heat::init_model(train_set.num_users(), train_set.num_items(), cfg, init);
        heat::TrainOptions opts;
        opts.eval_interval = eval_interval;
        std::vector<py::dict> history;
        opts.on_eval = [&](long epoch, const heat::MetricsReport& r) {
          py::gil_scoped_acquire acquire;
          auto d = metrics_dict(r);
          d["epoch"] = epoch;
          if (!on_eval.is_none()) on_eval(d);
          history.push_back(d);
        };
        std::vector<double> losses;
        opts.on_epoch = [&](const heat::EpochReport& r) { losses.push_back(r.mean_loss); };
        heat::TrainResult res;
        {
          py::gil_scoped_release release;
          res = heat::train(model, train_set, test_set, cfg, opts);
        }
        py::dict out;
        out["users"] = to_array(model.users);
        out["items"] = to_array(model.items);
        out["aggregator"] = model.aggregator ? py::object(to_array(*model.aggregator)) : py::none();
        out["metrics"] = metrics_dict(res.final_metrics);
        out["evaluations"] = history;
        out["losses"] = losses;
        return out;
      },
      py::arg("train"), py::arg("test"), py::arg("config"), py::arg("eval_interval") = 0, py::arg("init_std") = 0.01f,
      py::arg("on_eval") = py::none());

  // Command line, in process.
  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "heat");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = heat::app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
