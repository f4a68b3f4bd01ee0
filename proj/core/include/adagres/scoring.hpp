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
#include <string>
#include <span>
#include <vector>

#include "adagres/core.hpp"

namespace adagres {

// Subsets of a pool are passed around as chunk indices into that pool.
using Subset = std::vector<std::size_t>;

struct ScoreWeights {
  double alpha = 1.0;  // relevance weight, > 0
  double beta = 0.0;   // redundancy weight, >= 0

  // Throws Error when alpha <= 0 or beta < 0.
  void validate() const;
};

struct ScoreBreakdown {
  double relevance_sum = 0.0;
  double redundancy_sum = 0.0;
  double objective = 0.0;
};

// Sum of sim(q, c) over the subset.
double relevance_sum(const Query& query, const CandidatePool& pool,
                     std::span<const std::size_t> subset,
                     SimilarityMode mode = SimilarityMode::kClamped);

// Sum of sim(c_i, c_j) over unordered pairs i < j of the subset.
double redundancy_sum(const CandidatePool& pool,
                      std::span<const std::size_t> subset,
                      SimilarityMode mode = SimilarityMode::kClamped);

// alpha * relevance_sum - beta * redundancy_sum.
ScoreBreakdown objective(const Query& query, const CandidatePool& pool,
                         std::span<const std::size_t> subset,
                         const ScoreWeights& weights,
                         SimilarityMode mode = SimilarityMode::kClamped);

// Gain of adding `candidate` to `subset`:
//   alpha * sim(q, x) - beta * sum_{c in subset} sim(x, c).
// Throws Error when `candidate` is already in `subset`.
double marginal_gain(const Query& query, const CandidatePool& pool,
                     std::size_t candidate, std::span<const std::size_t> subset,
                     const ScoreWeights& weights,
                     SimilarityMode mode = SimilarityMode::kClamped);

// Pool indices ordered by descending sim(q, .); ties keep pool order.
std::vector<std::size_t> rank_by_relevance(const Query& query,
                                           const CandidatePool& pool);

// Dense cache of query and pairwise similarities for one (query, pool) pair.
// Used where the same pool is scored many times (exhaustive search, gap
// measurement); the free functions above stay cache-free.
class SimilarityTable {
 public:
  SimilarityTable(const Query& query, const CandidatePool& pool,
                  SimilarityMode mode = SimilarityMode::kClamped);
  // Similarities supplied directly, e.g. by an external scorer. `pairs` is a
  // row-major n x n symmetric matrix. Throws Error on shape or symmetry
  // violations or non-finite entries.
  SimilarityTable(std::vector<double> query_sims, std::vector<double> pairs);

  std::size_t size() const noexcept { return query_.size(); }
  double query(std::size_t i) const { return query_[i]; }
  double pair(std::size_t i, std::size_t j) const { return pairs_[i * n_ + j]; }

  // Largest pairwise similarity over distinct chunks; 0 for pools of size 1.
  double max_pair() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> query_;
  std::vector<double> pairs_;
};

// Everything selection needs about a pool, with embeddings replaced by their
// similarities.
struct PrecomputedPool {
  SimilarityTable sims;
  std::vector<std::string> ids;
  std::vector<std::int64_t> token_lengths;

  // Throws Error on size mismatch, duplicate ids or token lengths < 1.
  PrecomputedPool(SimilarityTable sims, std::vector<std::string> ids,
                  std::vector<std::int64_t> token_lengths);

  static PrecomputedPool from(const Query& query, const CandidatePool& pool,
                              SimilarityMode mode = SimilarityMode::kClamped);

  std::size_t size() const noexcept { return ids.size(); }
};

ScoreBreakdown objective(const SimilarityTable& sims,
                         std::span<const std::size_t> subset,
                         const ScoreWeights& weights);

double marginal_gain(const SimilarityTable& sims, std::size_t candidate,
                     std::span<const std::size_t> subset,
                     const ScoreWeights& weights);

}  // namespace adagres
