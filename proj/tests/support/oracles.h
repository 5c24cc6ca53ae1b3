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

#ifndef HEAT_TESTS_ORACLES_H_
#define HEAT_TESTS_ORACLES_H_

// Reference implementations used only by tests. They deliberately share no
// code with the library: long-double reductions, full sorts, explicit
// finite differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "heat/dataset.h"
#include "heat/embedding.h"
#include "heat/rng.h"

namespace heat::oracle {

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double uu = 0, vv = 0, uv = 0;
  for (size_t k = 0; k < u.size(); ++k) {
    uu += static_cast<long double>(u[k]) * u[k];
    vv += static_cast<long double>(v[k]) * v[k];
    uv += static_cast<long double>(u[k]) * v[k];
  }
  return static_cast<double>(uv / (std::sqrt(uu) * std::sqrt(vv)));
}

// Central differences of f at x along every coordinate.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    const double h = step * std::max(1.0, std::abs(orig));
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    g[k] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double ccl_loss(double pos, const std::vector<double>& negs, double mu, double theta) {
  double s = 0;
  for (double n : negs) s += std::max(0.0, n - theta);
  return (1 - pos) + mu / static_cast<double>(negs.size()) * s;
}

inline double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline std::vector<double> random_vec(Rng& rng, size_t k) {
  std::vector<double> v(k);
  for (auto& x : v) x = rng.normal();
  return v;
}

inline std::vector<float> random_fvec(Rng& rng, size_t k) {
  std::vector<float> v(k);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

// Full-sort ranking: all non-excluded items ordered by descending score
// (computed in long double from scratch), ties to the lower id.
inline std::vector<ItemId> full_sort_topk(std::span<const float> user, const EmbeddingMatrix& items,
                                          const std::vector<ItemId>& exclude, size_t k, bool cosine) {
  struct Scored {
    long double score;
    ItemId id;
  };
  std::vector<Scored> all;
  const std::set<ItemId> ex(exclude.begin(), exclude.end());
  for (size_t i = 0; i < items.rows(); ++i) {
    if (ex.contains(static_cast<ItemId>(i))) continue;
    long double uu = 0, vv = 0, uv = 0;
    for (size_t d = 0; d < user.size(); ++d) {
      const long double a = user[d];
      const long double b = items.row(i)[d];
      uu += a * a;
      vv += b * b;
      uv += a * b;
    }
    long double s = uv;
    if (cosine) s = (uu > 0 && vv > 0) ? uv / std::sqrt(uu * vv) : 0.0L;
    all.push_back({s, static_cast<ItemId>(i)});
  }
  std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::vector<ItemId> out;
  for (size_t r = 0; r < std::min(k, all.size()); ++r) out.push_back(all[r].id);
  return out;
}

struct Metrics {
  double recall = 0;
  double ndcg = 0;
};

inline Metrics brute_force_metrics(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                   const InteractionSet& train, const InteractionSet& test, size_t k,
                                   bool cosine) {
  double recall = 0, ndcg = 0;
  size_t n = 0;
  for (UserId u = 0; u < test.num_users(); ++u) {
    const auto truth_span = test.items_of(u);
    if (truth_span.empty()) continue;
    const std::set<ItemId> truth(truth_span.begin(), truth_span.end());
    std::vector<ItemId> ex;
    if (u < train.num_users()) ex.assign(train.items_of(u).begin(), train.items_of(u).end());
    const auto ranked = full_sort_topk(users.row(u), items, ex, k, cosine);
    double hits = 0, dcg = 0, idcg = 0;
    for (size_t r = 0; r < ranked.size(); ++r) {
      if (truth.contains(ranked[r])) {
        hits += 1;
        dcg += 1.0 / std::log2(static_cast<double>(r + 2));
      }
    }
    for (size_t r = 0; r < std::min(k, truth.size()); ++r) idcg += 1.0 / std::log2(static_cast<double>(r + 2));
    recall += hits / static_cast<double>(truth.size());
    ndcg += dcg / idcg;
    ++n;
  }
  return {recall / static_cast<double>(n), ndcg / static_cast<double>(n)};
}

// Double-precision shadow of the aggregation forward pass:
// h[b] = gamma * user[b] + (1 - gamma) * sum_k pooled[k] * W[k][b].
inline std::vector<double> aggregate_shadow(const std::vector<double>& user,
                                            const std::vector<std::vector<double>>& history,
                                            const std::vector<double>& w, double gamma) {
  const size_t k = user.size();
  std::vector<double> pooled(k, 0.0);
  for (const auto& h : history)
    for (size_t d = 0; d < k; ++d) pooled[d] += h[d] / static_cast<double>(history.size());
  std::vector<double> out(k);
  for (size_t b = 0; b < k; ++b) {
    double acc = 0;
    for (size_t r = 0; r < k; ++r) acc += pooled[r] * w[r * k + b];
    out[b] = gamma * user[b] + (1 - gamma) * acc;
  }
  return out;
}

}  // namespace heat::oracle

#endif  // HEAT_TESTS_ORACLES_H_
