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

#ifndef HEAT_KERNELS_H_
#define HEAT_KERNELS_H_

// Similarity, cosine-contrastive loss and analytical cosine gradients.
//
// Every K-length reduction accumulates in double over kLanes interleaved
// partial sums that are combined in a fixed order, so results depend only on
// the inputs (and the lanes let the compiler vectorize). Kernels are templated over the
// element type so the same code path runs on float embeddings and on double
// shadows in tests.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace heat {

enum class Similarity { kCosine, kDot };

// Reductions of one (user, item) forward pass, kept for the backward pass.
struct ForwardCache {
  double ss = 0.0;   // sum of squares of the user vector
  double tt = 0.0;   // sum of squares of the item vector
  double st = 0.0;   // dot product
  double sim = 0.0;  // cosine similarity
  bool degenerate = false;
};

struct LossParams {
  double mu = 1.0;     // weight of the negative term
  double theta = 0.8;  // margin below which negatives cost nothing
};

inline constexpr size_t kLanes = 8;

namespace detail {

inline double combine(const double (&acc)[kLanes]) {
  return ((acc[0] + acc[4]) + (acc[2] + acc[6])) + ((acc[1] + acc[5]) + (acc[3] + acc[7]));
}

}  // namespace detail

template <typename T>
double dot_similarity(std::span<const T> u, std::span<const T> v) {
  assert(u.size() == v.size());
  double acc[kLanes] = {};
  const size_t n = u.size();
  size_t k = 0;
  for (; k + kLanes <= n; k += kLanes)
    for (size_t l = 0; l < kLanes; ++l) acc[l] += static_cast<double>(u[k + l]) * static_cast<double>(v[k + l]);
  for (size_t l = 0; k < n; ++k, ++l) acc[l] += static_cast<double>(u[k]) * static_cast<double>(v[k]);
  return detail::combine(acc);
}

template <typename T>
double squared_norm(std::span<const T> u) {
  return dot_similarity<T>(u, u);
}

// Builds the cache from already-reduced sums. A zero-norm side makes the
// similarity (and both gradients) zero and marks the entry degenerate.
inline ForwardCache cosine_from_sums(double ss, double tt, double st) {
  ForwardCache c{ss, tt, st, 0.0, false};
  if (ss > 0.0 && tt > 0.0) {
    c.sim = st / std::sqrt(ss * tt);
  } else {
    c.degenerate = true;
  }
  return c;
}

// One fused pass over K computing all three reductions.
// Same as cosine_forward but with the user's sum of squares supplied, so a
// user vector shared by many pairs is reduced once.
template <typename T>
ForwardCache cosine_forward_with_user_norm(double ss, std::span<const T> u, std::span<const T> v) {
  assert(u.size() == v.size());
  double tt[kLanes] = {}, st[kLanes] = {};
  const size_t n = u.size();
  size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    for (size_t l = 0; l < kLanes; ++l) {
      const double a = u[k + l];
      const double b = v[k + l];
      tt[l] += b * b;
      st[l] += a * b;
    }
  }
  for (size_t l = 0; k < n; ++k, ++l) {
    const double a = u[k];
    const double b = v[k];
    tt[l] += b * b;
    st[l] += a * b;
  }
  return cosine_from_sums(ss, detail::combine(tt), detail::combine(st));
}

template <typename T>
ForwardCache cosine_forward(std::span<const T> u, std::span<const T> v) {
  assert(u.size() == v.size());
  return cosine_forward_with_user_norm<T>(squared_norm<T>(u), u, v);
}

inline double hinge(double x) { return x > 0.0 ? x : 0.0; }

// (1 - sim_pos) + mu/|N| * sum_j max(0, sim_neg_j - theta)
inline double ccl_loss(double sim_pos, std::span<const double> sim_negs, const LossParams& p) {
  if (sim_negs.empty()) throw std::invalid_argument("ccl_loss: negatives list is empty");
  double neg = 0.0;
  for (double s : sim_negs) neg += hinge(s - p.theta);
  return (1.0 - sim_pos) + p.mu / static_cast<double>(sim_negs.size()) * neg;
}

// Writes d loss / d sim_neg_j into dnegs and returns d loss / d sim_pos (-1).
// The indicator is strict: a negative exactly at theta gets zero gradient.
inline double ccl_loss_grad(double sim_pos, std::span<const double> sim_negs, const LossParams& p,
                            std::span<double> dnegs) {
  (void)sim_pos;
  if (sim_negs.empty()) throw std::invalid_argument("ccl_loss_grad: negatives list is empty");
  if (dnegs.size() != sim_negs.size()) throw std::invalid_argument("ccl_loss_grad: output size mismatch");
  const double w = p.mu / static_cast<double>(sim_negs.size());
  for (size_t j = 0; j < sim_negs.size(); ++j) dnegs[j] = sim_negs[j] > p.theta ? w : 0.0;
  return -1.0;
}

struct LossGrad {
  double dpos;
  std::vector<double> dnegs;
};

inline LossGrad ccl_loss_grad(double sim_pos, std::span<const double> sim_negs, const LossParams& p) {
  LossGrad g{0.0, std::vector<double>(sim_negs.size())};
  g.dpos = ccl_loss_grad(sim_pos, sim_negs, p, g.dnegs);
  return g;
}

// d sim / d u = (v * ss - st * u) / (ss * sqrt(ss) * sqrt(tt)), using the
// cached reductions only. out += scale * gradient.
template <typename T, typename Out>
void accumulate_cosine_grad_user(std::span<const T> u, std::span<const T> v, const ForwardCache& c,
                                 double scale, std::span<Out> out) {
  assert(u.size() == v.size() && out.size() == u.size());
  if (c.degenerate || scale == 0.0) return;
  const double denom = c.ss * std::sqrt(c.ss) * std::sqrt(c.tt);
  const double a = scale * c.ss / denom;
  const double b = scale * c.st / denom;
  for (size_t k = 0; k < u.size(); ++k) {
    out[k] += static_cast<Out>(a * static_cast<double>(v[k]) - b * static_cast<double>(u[k]));
  }
}

// d sim / d v = (u * tt - st * v) / (tt * sqrt(tt) * sqrt(ss)).
template <typename T, typename Out>
void accumulate_cosine_grad_item(std::span<const T> u, std::span<const T> v, const ForwardCache& c,
                                 double scale, std::span<Out> out) {
  assert(u.size() == v.size() && out.size() == u.size());
  if (c.degenerate || scale == 0.0) return;
  const double denom = c.tt * std::sqrt(c.tt) * std::sqrt(c.ss);
  const double a = scale * c.tt / denom;
  const double b = scale * c.st / denom;
  for (size_t k = 0; k < v.size(); ++k) {
    out[k] += static_cast<Out>(a * static_cast<double>(u[k]) - b * static_cast<double>(v[k]));
  }
}

template <typename T>
std::vector<double> cosine_grad_user(std::span<const T> u, std::span<const T> v, const ForwardCache& c) {
  std::vector<double> g(u.size(), 0.0);
  accumulate_cosine_grad_user<T, double>(u, v, c, 1.0, g);
  return g;
}

template <typename T>
std::vector<double> cosine_grad_item(std::span<const T> u, std::span<const T> v, const ForwardCache& c) {
  std::vector<double> g(u.size(), 0.0);
  accumulate_cosine_grad_item<T, double>(u, v, c, 1.0, g);
  return g;
}

// Gradients that redo the three reductions instead of reading the cache.
template <typename T>
std::vector<double> cosine_grad_user_recomputed(std::span<const T> u, std::span<const T> v) {
  return cosine_grad_user(u, v, cosine_forward(u, v));
}

template <typename T>
std::vector<double> cosine_grad_item_recomputed(std::span<const T> u, std::span<const T> v) {
  return cosine_grad_item(u, v, cosine_forward(u, v));
}

}  // namespace heat

#endif  // HEAT_KERNELS_H_
