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

#include "heat/kernels.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "../support/oracles.h"

namespace heat {
namespace {

using DSpan = std::span<const double>;
using FSpan = std::span<const float>;

TEST(DotSimilarity, HandExamples) {
  const std::vector<float> a{1, 0, 0}, b{0, 1, 0};
  EXPECT_EQ(dot_similarity<float>(a, b), 0.0);
  const std::vector<float> c{1, 2}, d{3, 4};
  EXPECT_EQ(dot_similarity<float>(c, d), 11.0);
}

TEST(DotSimilarity, MatchesNaiveLoop) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = oracle::random_fvec(rng, 128);
    const auto v = oracle::random_fvec(rng, 128);
    long double ref = 0;
    for (size_t k = 0; k < u.size(); ++k) ref += static_cast<long double>(u[k]) * v[k];
    const double got = dot_similarity<float>(u, v);
    EXPECT_LE(std::abs(got - static_cast<double>(ref)), 1e-12 * std::max(1.0L, std::abs(ref)));
  }
}

TEST(CosineForward, HandExamples) {
  const std::vector<double> e1{1, 0}, e2{0, 1}, diag{1, 1};
  auto c = cosine_forward<double>(e1, e1);
  EXPECT_EQ(c.sim, 1.0);
  EXPECT_EQ(c.ss, 1.0);
  EXPECT_EQ(c.tt, 1.0);
  EXPECT_EQ(c.st, 1.0);
  EXPECT_EQ(cosine_forward<double>(e1, e2).sim, 0.0);
  EXPECT_NEAR(cosine_forward<double>(diag, e1).sim, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CosineForward, ZeroNormIsDegenerate) {
  const std::vector<float> zero{0, 0, 0}, v{1, 2, 3};
  const auto c = cosine_forward<float>(zero, v);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.sim, 0.0);
  const auto g = cosine_grad_user<float>(zero, v, c);
  for (double x : g) EXPECT_EQ(x, 0.0);
  const auto gi = cosine_grad_item<float>(zero, v, c);
  for (double x : gi) EXPECT_EQ(x, 0.0);
}

TEST(CosineForward, BoundedAndScaleInvariant) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = oracle::random_vec(rng, 16);
    const auto v = oracle::random_vec(rng, 16);
    const auto c = cosine_forward<double>(u, v);
    EXPECT_LE(std::abs(c.sim), 1.0 + 4 * std::numeric_limits<double>::epsilon());
    EXPECT_DOUBLE_EQ(c.sim, c.st / std::sqrt(c.ss * c.tt));
    auto scaled = u;
    const double a = 0.01 + 10 * rng.uniform();
    for (auto& x : scaled) x *= a;
    EXPECT_NEAR(cosine_forward<double>(scaled, v).sim, c.sim, 1e-6);
  }
}

TEST(CclLoss, HandExamples) {
  const LossParams p{1.0, 0.8};
  const std::vector<double> low{0.1, -0.5, 0.8};
  EXPECT_EQ(ccl_loss(1.0, low, p), 0.0);
  const std::vector<double> negs{0.9, 0.3};
  EXPECT_NEAR(ccl_loss(0.5, negs, p), 0.55, 1e-15);
  EXPECT_NEAR(ccl_loss(0.3, negs, LossParams{0.0, 0.8}), 0.7, 1e-15);
  EXPECT_THROW(ccl_loss(0.3, {}, p), std::invalid_argument);
}

TEST(CclLossGrad, HingeIndicator) {
  const std::vector<double> negs{0.9, 0.3};
  const auto g = ccl_loss_grad(0.5, negs, LossParams{1.0, 0.8});
  EXPECT_EQ(g.dpos, -1.0);
  ASSERT_EQ(g.dnegs.size(), 2u);
  EXPECT_EQ(g.dnegs[0], 0.5);
  EXPECT_EQ(g.dnegs[1], 0.0);
  // Exactly at the margin the strict indicator gives zero.
  const std::vector<double> at{0.8};
  EXPECT_EQ(ccl_loss_grad(0.0, at, LossParams{1.0, 0.8}).dnegs[0], 0.0);
  EXPECT_THROW(ccl_loss_grad(0.3, {}, LossParams{}), std::invalid_argument);
}

TEST(CclLossGrad, MatchesFiniteDifferences) {
  Rng rng(5);
  const double step = 1e-6;
  for (int trial = 0; trial < 500; ++trial) {
    const LossParams p{2.0 * rng.uniform(), rng.uniform(-1, 1)};
    const double pos = rng.uniform(-1, 1);
    std::vector<double> negs(1 + rng.below(8));
    for (auto& n : negs) {
      do {
        n = rng.uniform(-1, 1);
      } while (std::abs(n - p.theta) < 10 * step);
    }
    const auto g = ccl_loss_grad(pos, negs, p);
    EXPECT_NEAR(g.dpos, (oracle::ccl_loss(pos + step, negs, p.mu, p.theta) -
                         oracle::ccl_loss(pos - step, negs, p.mu, p.theta)) / (2 * step), 1e-5);
    for (size_t j = 0; j < negs.size(); ++j) {
      auto hi = negs, lo = negs;
      hi[j] += step;
      lo[j] -= step;
      const double fd = (oracle::ccl_loss(pos, hi, p.mu, p.theta) - oracle::ccl_loss(pos, lo, p.mu, p.theta)) / (2 * step);
      EXPECT_NEAR(g.dnegs[j], fd, 1e-5);
    }
    EXPECT_GE(ccl_loss(std::min(pos, 1.0), negs, p), 0.0);
  }
}

TEST(CosineGrad, OrthonormalCases) {
  const std::vector<double> e1{1, 0}, e2{0, 1};
  {
    const auto c = cosine_forward<double>(e1, e2);
    EXPECT_EQ(cosine_grad_user<double>(e1, e2, c), (std::vector<double>{0, 1}));
  }
  {
    const auto c = cosine_forward<double>(e1, e1);
    EXPECT_EQ(cosine_grad_user<double>(e1, e1, c), (std::vector<double>{0, 0}));
    EXPECT_EQ(cosine_grad_item<double>(e1, e1, c), (std::vector<double>{0, 0}));
  }
  {
    const auto c = cosine_forward<double>(e2, e1);
    EXPECT_EQ(cosine_grad_item<double>(e2, e1, c), (std::vector<double>{0, 1}));
  }
}

TEST(CosineGrad, MatchesFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = oracle::random_vec(rng, 64);
    const auto v = oracle::random_vec(rng, 64);
    const auto c = cosine_forward<double>(u, v);
    const auto gu = cosine_grad_user<double>(u, v, c);
    const auto gv = cosine_grad_item<double>(u, v, c);
    const auto fu = oracle::central_diff([&](const std::vector<double>& x) { return oracle::cosine(x, v); }, u, 1e-6);
    const auto fv = oracle::central_diff([&](const std::vector<double>& x) { return oracle::cosine(u, x); }, v, 1e-6);
    EXPECT_LT(oracle::rel_err(gu, fu), 1e-4);
    EXPECT_LT(oracle::rel_err(gv, fv), 1e-4);
  }
}

TEST(CosineGrad, OrthogonalToOwnVector) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = oracle::random_vec(rng, 32);
    const auto v = oracle::random_vec(rng, 32);
    const auto c = cosine_forward<double>(u, v);
    const auto gu = cosine_grad_user<double>(u, v, c);
    const auto gv = cosine_grad_item<double>(u, v, c);
    const double nu = std::sqrt(dot_similarity<double>(gu, gu)) * std::sqrt(c.ss);
    const double nv = std::sqrt(dot_similarity<double>(gv, gv)) * std::sqrt(c.tt);
    EXPECT_LE(std::abs(dot_similarity<double>(gu, u)), 1e-6 * nu);
    EXPECT_LE(std::abs(dot_similarity<double>(gv, v)), 1e-6 * nv);
  }
}

TEST(CosineGrad, ItemGradIsUserGradWithRolesSwapped) {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = oracle::random_fvec(rng, 24);
    const auto v = oracle::random_fvec(rng, 24);
    const auto c = cosine_forward<float>(u, v);
    const auto swapped = cosine_forward<float>(v, u);
    EXPECT_EQ(swapped.ss, c.tt);
    EXPECT_EQ(swapped.tt, c.ss);
    EXPECT_EQ(cosine_grad_item<float>(u, v, c), cosine_grad_user<float>(v, u, swapped));
  }
}

TEST(CosineGrad, CachedEqualsRecomputedBitForBit) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = oracle::random_fvec(rng, 128);
    const auto v = oracle::random_fvec(rng, 128);
    const auto c = cosine_forward<float>(u, v);
    EXPECT_EQ(cosine_grad_user<float>(u, v, c), cosine_grad_user_recomputed<float>(u, v));
    EXPECT_EQ(cosine_grad_item<float>(u, v, c), cosine_grad_item_recomputed<float>(u, v));
    // The shared-user-norm path reduces identically.
    const auto c2 = cosine_forward_with_user_norm<float>(squared_norm<float>(u), u, v);
    EXPECT_EQ(c2.sim, c.sim);
  }
}

}  // namespace
}  // namespace heat
