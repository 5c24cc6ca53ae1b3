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

#include "heat/embedding.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "heat/rng.h"

namespace heat {

namespace {

constexpr char kMagic[8] = {'H', 'E', 'A', 'T', 'E', 'M', 'B', '1'};
constexpr char kAggregatorTag[4] = {'A', 'G', 'G', 'W'};
constexpr char kEpochTag[4] = {'E', 'P', 'O', 'C'};

static_assert(std::numeric_limits<float>::is_iec559);

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_floats(std::string& out, std::span<const float> values) {
  const size_t base = out.size();
  out.resize(base + values.size() * 4);
  char* dst = out.data() + base;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, values.data(), values.size() * 4);
  } else {
    for (float f : values) {
      const auto bits = std::bit_cast<uint32_t>(f);
      for (int i = 0; i < 4; ++i) *dst++ = static_cast<char>((bits >> (8 * i)) & 0xFF);
    }
  }
}

void put_matrix(std::string& out, const EmbeddingMatrix& m) {
  if (m.rows() > UINT32_MAX || m.dim() > UINT32_MAX) {
    throw std::invalid_argument("matrix too large for checkpoint format");
  }
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<uint32_t>(m.rows()));
  put_u32(out, static_cast<uint32_t>(m.dim()));
  put_floats(out, m.values());
}

// Cursor over an in-memory file image.
class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  size_t remaining() const { return bytes_.size() - pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  bool peek(const char* tag, size_t len) const {
    return remaining() >= len && std::memcmp(bytes_.data() + pos_, tag, len) == 0;
  }

  void expect(const char* tag, size_t len, const char* what) {
    if (!peek(tag, len)) throw CorruptCheckpoint(std::string("bad ") + what);
    pos_ += len;
  }

  uint32_t u32() {
    need(4, "header");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  void floats(std::span<float> out) {
    need(out.size() * 4, "float body");
    const char* src = bytes_.data() + pos_;
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(out.data(), src, out.size() * 4);
    } else {
      for (float& f : out) {
        uint32_t bits = 0;
        for (int i = 0; i < 4; ++i) bits |= static_cast<uint32_t>(static_cast<unsigned char>(*src++)) << (8 * i);
        f = std::bit_cast<float>(bits);
      }
    }
    pos_ += out.size() * 4;
  }

  EmbeddingMatrix matrix() {
    expect(kMagic, sizeof(kMagic), "magic");
    const uint32_t rows = u32();
    const uint32_t dim = u32();
    const uint64_t count = static_cast<uint64_t>(rows) * dim;
    if (count * 4 > remaining()) {
      throw CorruptCheckpoint("truncated checkpoint: header declares " + std::to_string(rows) + "x" +
                              std::to_string(dim) + " values");
    }
    EmbeddingMatrix m(rows, dim);
    floats(m.values());
    return m;
  }

 private:
  void need(size_t n, const char* what) const {
    if (remaining() < n) throw CorruptCheckpoint(std::string("truncated checkpoint (") + what + ")");
  }

  std::string bytes_;
  size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  // Write-then-rename so a crash never leaves a half-written checkpoint.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(size_t rows, size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows * dim) {
    throw std::invalid_argument("EmbeddingMatrix: data length != rows * dim");
  }
}

bool EmbeddingMatrix::all_finite() const {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool EmbeddingMatrix::bit_equal(const EmbeddingMatrix& other) const {
  return rows_ == other.rows_ && dim_ == other.dim_ &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

EmbeddingMatrix init_matrix(size_t rows, size_t dim, const InitSpec& spec) {
  if (rows == 0 || dim == 0) throw std::invalid_argument("init_matrix: rows and dim must be >= 1");
  EmbeddingMatrix m(rows, dim);
  Rng rng(spec.seed);
  switch (spec.kind) {
    case InitSpec::Kind::kNormal: {
      if (!(spec.std > 0.0f) || !std::isfinite(spec.std) || !std::isfinite(spec.mean)) {
        throw std::invalid_argument("init_matrix: normal init requires finite mean and std > 0");
      }
      for (float& v : m.values()) {
        v = static_cast<float>(spec.mean + spec.std * rng.normal());
      }
      break;
    }
    case InitSpec::Kind::kXavier: {
      const double bound = std::sqrt(6.0 / static_cast<double>(rows + dim));
      const auto fbound = static_cast<float>(bound);
      for (float& v : m.values()) {
        // Rounding to float can land one ulp outside the bound.
        v = std::clamp(static_cast<float>(rng.uniform(-bound, bound)), -fbound, fbound);
      }
      break;
    }
  }
  return m;
}

void save_checkpoint(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  std::string out;
  out.reserve(16 + m.values().size() * 4);
  put_matrix(out, m);
  write_file(path, out);
}

EmbeddingMatrix load_checkpoint(const std::filesystem::path& path) {
  Reader in(read_file(path));
  EmbeddingMatrix m = in.matrix();
  if (!in.done()) {
    throw CorruptCheckpoint("trailing bytes after matrix body (" + std::to_string(in.remaining()) + ")");
  }
  if (!m.all_finite()) throw CorruptCheckpoint("checkpoint contains non-finite values");
  return m;
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
  save_model(model.users, model.items, model.aggregator ? &*model.aggregator : nullptr, model.epochs_done, path);
}

void save_model(const EmbeddingMatrix& users, const EmbeddingMatrix& items, const EmbeddingMatrix* aggregator,
                uint32_t epochs_done, const std::filesystem::path& path) {
  if (users.dim() != items.dim()) throw std::invalid_argument("user/item embedding dimensions differ");
  std::string out;
  put_matrix(out, users);
  put_matrix(out, items);
  if (aggregator != nullptr) {
    const auto& w = *aggregator;
    if (w.rows() != users.dim() || w.dim() != users.dim()) {
      throw std::invalid_argument("aggregator weights must be dim x dim");
    }
    out.append(kAggregatorTag, sizeof(kAggregatorTag));
    put_floats(out, w.values());
  }
  out.append(kEpochTag, sizeof(kEpochTag));
  put_u32(out, epochs_done);
  write_file(path, out);
}

ModelState load_model(const std::filesystem::path& path) {
  Reader in(read_file(path));
  ModelState model;
  model.users = in.matrix();
  model.items = in.matrix();
  if (model.users.dim() != model.items.dim()) {
    throw CorruptCheckpoint("user/item embedding dimensions differ");
  }
  while (!in.done()) {
    if (in.peek(kAggregatorTag, 4)) {
      in.expect(kAggregatorTag, 4, "section tag");
      const size_t k = model.users.dim();
      EmbeddingMatrix w(k, k);
      in.floats(w.values());
      model.aggregator = std::move(w);
    } else if (in.peek(kEpochTag, 4)) {
      in.expect(kEpochTag, 4, "section tag");
      model.epochs_done = in.u32();
    } else {
      throw CorruptCheckpoint("unknown section tag in model checkpoint");
    }
  }
  const bool finite = model.users.all_finite() && model.items.all_finite() &&
                      (!model.aggregator || model.aggregator->all_finite());
  if (!finite) throw CorruptCheckpoint("checkpoint contains non-finite values");
  return model;
}

}  // namespace heat
