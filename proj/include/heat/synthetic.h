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

#ifndef HEAT_SYNTHETIC_H_
#define HEAT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "heat/dataset.h"

namespace heat {

// Clustered implicit-feedback generator for tests and benchmarks. Users and
// items belong to latent clusters; most of a user's items come from the
// user's cluster, with a skewed popularity inside each cluster.
struct SyntheticSpec {
  size_t num_users = 1000;
  size_t num_items = 2000;
  double mean_degree = 20.0;
  size_t num_clusters = 20;
  double in_cluster = 0.8;
  double test_fraction = 0.2;
  uint64_t seed = 1;
};

struct SyntheticData {
  InteractionSet train;
  InteractionSet test;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace heat

#endif  // HEAT_SYNTHETIC_H_
