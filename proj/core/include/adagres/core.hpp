// Copyright 2026 The AdaGReS Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adagres {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// kClamped is max(0, a.b), the similarity every objective uses by default.
// kRaw keeps the signed dot product and exists to study what breaks without
// the clamp.
enum class SimilarityMode { kClamped, kRaw };

// A unit-norm dense vector. The only way to build one is normalize(), so every
// Embedding in the program has norm 1 up to rounding.
class Embedding {
 public:
  // Throws Error when `raw` is empty or its norm is below 1e-12. `label`
  // (e.g. a chunk id) is included in the message when given.
  static Embedding normalize(std::span<const double> raw,
                             std::string_view label = {});
  static Embedding normalize(std::span<const float> raw,
                             std::string_view label = {});

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}

  std::vector<double> values_;
};

// Signed dot product. Throws Error naming both dimensions when they differ.
double dot(const Embedding& a, const Embedding& b);

// max(0, a.b): in [0, 1] for unit vectors.
double sim(const Embedding& a, const Embedding& b);

double similarity(const Embedding& a, const Embedding& b, SimilarityMode mode);

struct Chunk {
  std::string id;
  Embedding embedding;
  std::int64_t token_length = 1;
  std::optional<std::string> text;
};

struct Query {
  std::string id;
  Embedding embedding;
  std::optional<std::string> text;
};

// Ordered, immutable list of candidate chunks sharing one dimension and with
// pairwise distinct ids. An empty pool is representable (an empty chunk file)
// but every selection routine rejects it.
class CandidatePool {
 public:
  CandidatePool() = default;
  explicit CandidatePool(std::vector<Chunk> chunks);

  std::size_t size() const noexcept { return chunks_.size(); }
  bool empty() const noexcept { return chunks_.empty(); }
  std::size_t dimension() const noexcept { return dimension_; }

  const Chunk& operator[](std::size_t i) const { return chunks_[i]; }
  std::span<const Chunk> chunks() const noexcept { return chunks_; }
  auto begin() const noexcept { return chunks_.begin(); }
  auto end() const noexcept { return chunks_.end(); }

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws Error("unknown chunk id ...") when absent.
  std::size_t index_of(std::string_view id) const;
  std::vector<std::size_t> indices_of(std::span<const std::string> ids) const;

  // A new pool holding the chunks at `indices`, in that order.
  CandidatePool view(std::span<const std::size_t> indices) const;

 private:
  std::vector<Chunk> chunks_;
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Throws Error when the query cannot be scored against `pool`.
void check_compatible(const Query& query, const CandidatePool& pool);

}  // namespace adagres
