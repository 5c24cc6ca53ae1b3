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

#ifndef HEAT_DATASET_H_
#define HEAT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heat {

using UserId = uint32_t;
using ItemId = uint32_t;

// Compressed per-user adjacency (CSR) of positive items. Each user's slice is
// sorted ascending and duplicate-free. Immutable once built.
class InteractionSet {
 public:
  InteractionSet() : offsets_{0} {}

  // From per-user item lists; lists are sorted and deduplicated.
  static InteractionSet from_lists(std::vector<std::vector<ItemId>> lists, size_t num_items = 0);

  size_t num_users() const { return offsets_.size() - 1; }
  size_t num_items() const { return num_items_; }
  size_t num_interactions() const { return items_.size(); }

  std::span<const ItemId> items_of(UserId u) const {
    return {items_.data() + offsets_[u], items_.data() + offsets_[u + 1]};
  }
  bool contains(UserId u, ItemId i) const;

  std::span<const uint64_t> offsets() const { return offsets_; }
  std::span<const ItemId> items() const { return items_; }

  // Grows the id universes (never shrinks). Used to align train and test.
  InteractionSet with_universe(size_t num_users, size_t num_items) const;

  bool operator==(const InteractionSet&) const = default;

 private:
  size_t num_items_ = 0;
  std::vector<uint64_t> offsets_;
  std::vector<ItemId> items_;
};

struct TrainingPair {
  UserId user;
  ItemId item;
  bool operator==(const TrainingPair&) const = default;
};

enum class InteractionFormat {
  kAdjacency,  // "user item item ..."
  kPairs,      // "user item"
};

class ParseError : public std::runtime_error {
 public:
  ParseError(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

InteractionSet parse_interactions(std::istream& in, InteractionFormat format);
InteractionSet parse_interactions(const std::filesystem::path& path, InteractionFormat format);

// Adjacency-format writer; users with empty slices are written as a bare id.
void write_adjacency(const InteractionSet& set, std::ostream& out);

// Aligns both sets to the union of their user and item universes.
void align_universes(InteractionSet& train, InteractionSet& test);

// All (user, item) pairs of `train` in a seed-determined random order.
std::vector<TrainingPair> epoch_pairs(const InteractionSet& train, uint64_t seed);

// Prefix of the user's train slice, at most max_history long.
std::span<const ItemId> history_of(const InteractionSet& train, UserId user, size_t max_history);

}  // namespace heat

#endif  // HEAT_DATASET_H_
