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

#include "heat/synthetic.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "heat/rng.h"

namespace heat {

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.num_users == 0 || spec.num_items == 0 || spec.num_clusters == 0) {
    throw std::invalid_argument("synthetic: users, items and clusters must be >= 1");
  }
  if (spec.num_clusters > spec.num_items) throw std::invalid_argument("synthetic: more clusters than items");
  Rng rng(spec.seed);
  const size_t c_count = spec.num_clusters;
  // Items are dealt to clusters round-robin: cluster c owns c, c + C, ...
  auto cluster_size = [&](size_t c) { return (spec.num_items - c + c_count - 1) / c_count; };

  std::vector<std::vector<ItemId>> train(spec.num_users), test(spec.num_users);
  std::vector<ItemId> picked;
  for (size_t u = 0; u < spec.num_users; ++u) {
    const size_t cluster = rng.below(c_count);
    // Degree: at least 2 so every user can contribute to both splits.
    const double x = rng.uniform();
    const auto degree = std::max<size_t>(2, static_cast<size_t>(std::llround(-spec.mean_degree * std::log1p(-x))));
    picked.clear();
    for (size_t d = 0; d < degree; ++d) {
      ItemId item;
      if (rng.uniform() < spec.in_cluster) {
        // Quadratic skew toward low ranks = popular items.
        const double r = rng.uniform();
        const auto rank = static_cast<size_t>(r * r * static_cast<double>(cluster_size(cluster)));
        item = static_cast<ItemId>(cluster + rank * c_count);
      } else {
        item = static_cast<ItemId>(rng.below(spec.num_items));
      }
      picked.push_back(item);
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    // Fisher-Yates, then split off the test share.
    for (size_t k = picked.size(); k > 1; --k) std::swap(picked[k - 1], picked[rng.below(k)]);
    size_t n_test = static_cast<size_t>(std::floor(spec.test_fraction * static_cast<double>(picked.size())));
    if (picked.size() >= 2 && n_test == 0 && spec.test_fraction > 0) n_test = 1;
    test[u].assign(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(n_test));
    train[u].assign(picked.begin() + static_cast<std::ptrdiff_t>(n_test), picked.end());
  }
  SyntheticData out{InteractionSet::from_lists(std::move(train), spec.num_items),
                    InteractionSet::from_lists(std::move(test), spec.num_items)};
  align_universes(out.train, out.test);
  return out;
}

}  // namespace heat
