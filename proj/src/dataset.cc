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

#include "heat/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "heat/rng.h"

namespace heat {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

// Splits a line into unsigned ids; throws ParseError on anything else.
void tokenize(std::string_view line, size_t line_no, std::vector<uint64_t>& out) {
  out.clear();
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    const std::string_view tok = line.substr(i, j - i);
    if (tok.front() == '-') throw ParseError(line_no, "negative id '" + std::string(tok) + "'");
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no, "not an integer id '" + std::string(tok) + "'");
    }
    if (v > UINT32_MAX - 1) throw ParseError(line_no, "id out of range '" + std::string(tok) + "'");
    out.push_back(v);
    i = j;
  }
}

}  // namespace

InteractionSet InteractionSet::from_lists(std::vector<std::vector<ItemId>> lists, size_t num_items) {
  InteractionSet set;
  set.offsets_.reserve(lists.size() + 1);
  size_t total = 0;
  for (auto& l : lists) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    total += l.size();
  }
  set.items_.reserve(total);
  size_t max_item_plus_one = 0;
  for (const auto& l : lists) {
    set.items_.insert(set.items_.end(), l.begin(), l.end());
    set.offsets_.push_back(set.items_.size());
    if (!l.empty()) max_item_plus_one = std::max<size_t>(max_item_plus_one, l.back() + 1);
  }
  set.num_items_ = std::max(num_items, max_item_plus_one);
  return set;
}

bool InteractionSet::contains(UserId u, ItemId i) const {
  auto s = items_of(u);
  return std::binary_search(s.begin(), s.end(), i);
}

InteractionSet InteractionSet::with_universe(size_t num_users, size_t num_items) const {
  InteractionSet out = *this;
  if (num_users > this->num_users()) out.offsets_.resize(num_users + 1, items_.size());
  out.num_items_ = std::max(num_items_, num_items);
  return out;
}

InteractionSet parse_interactions(std::istream& in, InteractionFormat format) {
  std::vector<std::vector<ItemId>> lists;
  std::vector<uint64_t> ids;
  std::string line;
  size_t line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    tokenize(line, line_no, ids);
    if (ids.empty()) continue;
    if (format == InteractionFormat::kPairs && ids.size() != 2) {
      throw ParseError(line_no, "expected 'user item', got " + std::to_string(ids.size()) + " tokens");
    }
    const auto user = static_cast<size_t>(ids[0]);
    if (lists.size() <= user) lists.resize(user + 1);
    auto& dst = lists[user];
    for (size_t k = 1; k < ids.size(); ++k) dst.push_back(static_cast<ItemId>(ids[k]));
    any = true;
  }
  if (!any) throw ParseError(line_no == 0 ? 1 : line_no, "empty interaction file");
  return InteractionSet::from_lists(std::move(lists));
}

InteractionSet parse_interactions(const std::filesystem::path& path, InteractionFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interaction file: " + path.string());
  try {
    return parse_interactions(in, format);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void write_adjacency(const InteractionSet& set, std::ostream& out) {
  for (UserId u = 0; u < set.num_users(); ++u) {
    out << u;
    for (ItemId i : set.items_of(u)) out << ' ' << i;
    out << '\n';
  }
}

void align_universes(InteractionSet& train, InteractionSet& test) {
  const size_t users = std::max(train.num_users(), test.num_users());
  const size_t items = std::max(train.num_items(), test.num_items());
  train = train.with_universe(users, items);
  test = test.with_universe(users, items);
}

std::vector<TrainingPair> epoch_pairs(const InteractionSet& train, uint64_t seed) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(train.num_interactions());
  for (UserId u = 0; u < train.num_users(); ++u) {
    for (ItemId i : train.items_of(u)) pairs.push_back({u, i});
  }
  // Fisher-Yates with our own generator; std::shuffle is library-specific.
  Rng rng(seed);
  for (size_t k = pairs.size(); k > 1; --k) {
    std::swap(pairs[k - 1], pairs[rng.below(k)]);
  }
  return pairs;
}

std::span<const ItemId> history_of(const InteractionSet& train, UserId user, size_t max_history) {
  if (user >= train.num_users()) {
    throw std::invalid_argument("history_of: user " + std::to_string(user) + " out of range");
  }
  auto s = train.items_of(user);
  return s.first(std::min(s.size(), max_history));
}

}  // namespace heat
