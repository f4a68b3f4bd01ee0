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

#include "adagres/core.hpp"

#include <cmath>
#include <string>

namespace adagres {
namespace {

constexpr double kMinNorm = 1e-12;

std::string describe(std::string_view label) {
  return label.empty() ? std::string() : " (" + std::string(label) + ")";
}

}  // namespace

Embedding Embedding::normalize(std::span<const double> raw,
                               std::string_view label) {
  if (raw.empty()) {
    throw Error("empty vector" + describe(label));
  }
  double sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error("non-finite vector component" + describe(label));
    }
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm < kMinNorm) {
    throw Error("zero-norm vector" + describe(label));
  }
  std::vector<double> values(raw.begin(), raw.end());
  for (double& v : values) v /= norm;
  return Embedding(std::move(values));
}

Embedding Embedding::normalize(std::span<const float> raw,
                               std::string_view label) {
  std::vector<double> widened(raw.begin(), raw.end());
  return normalize(std::span<const double>(widened), label);
}

double dot(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw Error("dimension mismatch: " + std::to_string(a.dimension()) +
                " vs " + std::to_string(b.dimension()));
  }
  const auto x = a.values();
  const auto y = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double sim(const Embedding& a, const Embedding& b) {
  const double d = dot(a, b);
  return d > 0.0 ? d : 0.0;
}

double similarity(const Embedding& a, const Embedding& b, SimilarityMode mode) {
  return mode == SimilarityMode::kClamped ? sim(a, b) : dot(a, b);
}

CandidatePool::CandidatePool(std::vector<Chunk> chunks)
    : chunks_(std::move(chunks)) {
  by_id_.reserve(chunks_.size());
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    const Chunk& c = chunks_[i];
    if (i == 0) dimension_ = c.embedding.dimension();
    if (c.embedding.dimension() != dimension_) {
      throw Error("chunk '" + c.id + "' has dimension " +
                  std::to_string(c.embedding.dimension()) + ", pool has " +
                  std::to_string(dimension_));
    }
    if (c.token_length < 1) {
      throw Error("chunk '" + c.id + "' has token length " +
                  std::to_string(c.token_length) + " (must be >= 1)");
    }
    if (!by_id_.emplace(c.id, i).second) {
      throw Error("duplicate chunk id '" + c.id + "'");
    }
  }
}

std::optional<std::size_t> CandidatePool::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t CandidatePool::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error("unknown chunk id '" + std::string(id) + "'");
}

std::vector<std::size_t> CandidatePool::indices_of(
    std::span<const std::string> ids) const {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(index_of(id));
  return out;
}

CandidatePool CandidatePool::view(std::span<const std::size_t> indices) const {
  std::vector<Chunk> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= chunks_.size()) {
      throw Error("chunk index " + std::to_string(i) + " outside pool of size " +
                  std::to_string(chunks_.size()));
    }
    picked.push_back(chunks_[i]);
  }
  return CandidatePool(std::move(picked));
}

void check_compatible(const Query& query, const CandidatePool& pool) {
  if (pool.empty()) throw Error("candidate pool is empty");
  if (query.embedding.dimension() != pool.dimension()) {
    throw Error("dimension mismatch: query '" + query.id + "' has " +
                std::to_string(query.embedding.dimension()) + ", pool has " +
                std::to_string(pool.dimension()));
  }
}

}  // namespace adagres
