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

#ifndef HEAT_EMBEDDING_H_
#define HEAT_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heat {

// Dense row-major matrix of per-entity embedding vectors (one row per user or
// item). Rows are mutated in place by trainer threads without locks.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(size_t rows, size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}
  EmbeddingMatrix(size_t rows, size_t dim, std::vector<float> data);

  size_t rows() const { return rows_; }
  size_t dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  std::span<float> row(size_t r) { return {data_.data() + r * dim_, dim_}; }
  std::span<const float> row(size_t r) const { return {data_.data() + r * dim_, dim_}; }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  bool all_finite() const;

  // Bitwise comparison (distinguishes -0.0 from 0.0 and compares NaN payloads).
  bool bit_equal(const EmbeddingMatrix& other) const;

 private:
  size_t rows_ = 0;
  size_t dim_ = 0;
  std::vector<float> data_;
};

struct InitSpec {
  enum class Kind { kNormal, kXavier };
  Kind kind = Kind::kNormal;
  float mean = 0.0f;
  float std = 0.01f;
  uint64_t seed = 0;
};

// Normal: i.i.d. N(mean, std^2). Xavier: uniform in +-sqrt(6 / (rows + dim)).
EmbeddingMatrix init_matrix(size_t rows, size_t dim, const InitSpec& spec);

class CorruptCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-matrix file: "HEATEMB1", u32 rows, u32 dim, rows*dim binary32, all
// little-endian.
void save_checkpoint(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix load_checkpoint(const std::filesystem::path& path);

// Model container: user block, item block (both in the single-matrix layout
// above), then optional tagged sections:
//   "AGGW" + dim*dim binary32   aggregator weights
//   "EPOC" + u32                 number of completed epochs
struct ModelState {
  EmbeddingMatrix users;
  EmbeddingMatrix items;
  std::optional<EmbeddingMatrix> aggregator;
  uint32_t epochs_done = 0;
};

void save_model(const ModelState& model, const std::filesystem::path& path);
void save_model(const EmbeddingMatrix& users, const EmbeddingMatrix& items, const EmbeddingMatrix* aggregator,
                uint32_t epochs_done, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

}  // namespace heat

#endif  // HEAT_EMBEDDING_H_
