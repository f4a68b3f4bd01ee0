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

#include "adagres/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <numeric>
#include <string>

namespace adagres {
namespace {

template <typename NameOf>
void check_subset(std::size_t pool_size, std::span<const std::size_t> subset,
                  NameOf&& name_of) {
  std::vector<bool> seen(pool_size, false);
  for (std::size_t i : subset) {
    if (i >= pool_size) {
      throw Error("chunk index " + std::to_string(i) +
                  " is not in pool of size " + std::to_string(pool_size));
    }
    if (seen[i]) {
      throw Error("chunk '" + name_of(i) + "' appears twice in subset");
    }
    seen[i] = true;
  }
}

void check_subset(const CandidatePool& pool,
                  std::span<const std::size_t> subset) {
  check_subset(pool.size(), subset,
               [&](std::size_t i) { return pool[i].id; });
}

void check_subset(const SimilarityTable& sims,
                  std::span<const std::size_t> subset) {
  check_subset(sims.size(), subset,
               [](std::size_t i) { return "#" + std::to_string(i); });
}

}  // namespace

void ScoreWeights::validate() const {
  if (!(alpha > 0.0)) {
    throw Error("alpha must be > 0, got " + std::to_string(alpha));
  }
  if (!(beta >= 0.0)) {
    throw Error("beta must be >= 0, got " + std::to_string(beta));
  }
}

double relevance_sum(const Query& query, const CandidatePool& pool,
                     std::span<const std::size_t> subset, SimilarityMode mode) {
  check_subset(pool, subset);
  double total = 0.0;
  for (std::size_t i : subset) {
    total += similarity(query.embedding, pool[i].embedding, mode);
  }
  return total;
}

double redundancy_sum(const CandidatePool& pool,
                      std::span<const std::size_t> subset,
                      SimilarityMode mode) {
  check_subset(pool, subset);
  double total = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      total += similarity(pool[subset[a]].embedding, pool[subset[b]].embedding,
                          mode);
    }
  }
  return total;
}

ScoreBreakdown objective(const Query& query, const CandidatePool& pool,
                         std::span<const std::size_t> subset,
                         const ScoreWeights& weights, SimilarityMode mode) {
  weights.validate();
  ScoreBreakdown out;
  out.relevance_sum = relevance_sum(query, pool, subset, mode);
  out.redundancy_sum = redundancy_sum(pool, subset, mode);
  out.objective =
      weights.alpha * out.relevance_sum - weights.beta * out.redundancy_sum;
  return out;
}

double marginal_gain(const Query& query, const CandidatePool& pool,
                     std::size_t candidate, std::span<const std::size_t> subset,
                     const ScoreWeights& weights, SimilarityMode mode) {
  weights.validate();
  check_subset(pool, subset);
  if (candidate >= pool.size()) {
    throw Error("chunk index " + std::to_string(candidate) +
                " is not in pool of size " + std::to_string(pool.size()));
  }
  if (std::find(subset.begin(), subset.end(), candidate) != subset.end()) {
    throw Error("chunk '" + pool[candidate].id + "' is already selected");
  }
  const Embedding& x = pool[candidate].embedding;
  double overlap = 0.0;
  for (std::size_t c : subset) overlap += similarity(x, pool[c].embedding, mode);
  return weights.alpha * similarity(query.embedding, x, mode) -
         weights.beta * overlap;
}

std::vector<std::size_t> rank_by_relevance(const Query& query,
                                           const CandidatePool& pool) {
  std::vector<double> sims(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    sims[i] = sim(query.embedding, pool[i].embedding);
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sims[a] > sims[b];
  });
  return order;
}

SimilarityTable::SimilarityTable(const Query& query, const CandidatePool& pool,
                                 SimilarityMode mode)
    : n_(pool.size()), query_(n_), pairs_(n_ * n_, 0.0) {
  check_compatible(query, pool);
  for (std::size_t i = 0; i < n_; ++i) {
    query_[i] = similarity(query.embedding, pool[i].embedding, mode);
    pairs_[i * n_ + i] = similarity(pool[i].embedding, pool[i].embedding, mode);
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double s = similarity(pool[i].embedding, pool[j].embedding, mode);
      pairs_[i * n_ + j] = s;
      pairs_[j * n_ + i] = s;
    }
  }
}

SimilarityTable::SimilarityTable(std::vector<double> query_sims,
                                 std::vector<double> pairs)
    : n_(query_sims.size()), query_(std::move(query_sims)), pairs_(std::move(pairs)) {
  if (pairs_.size() != n_ * n_) {
    throw Error("pair matrix has " + std::to_string(pairs_.size()) +
                " entries, expected " + std::to_string(n_ * n_));
  }
  for (double v : query_) {
    if (!std::isfinite(v)) throw Error("non-finite query similarity");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (!std::isfinite(pair(i, j))) throw Error("non-finite pair similarity");
      if (pair(i, j) != pair(j, i)) {
        throw Error("pair matrix is not symmetric at (" + std::to_string(i) +
                    ", " + std::to_string(j) + ")");
      }
    }
  }
}

double SimilarityTable::max_pair() const {
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (!any || pair(i, j) > best) best = pair(i, j);
      any = true;
    }
  }
  return best;
}

PrecomputedPool::PrecomputedPool(SimilarityTable table,
                                 std::vector<std::string> chunk_ids,
                                 std::vector<std::int64_t> lengths)
    : sims(std::move(table)),
      ids(std::move(chunk_ids)),
      token_lengths(std::move(lengths)) {
  if (ids.size() != sims.size() || token_lengths.size() != sims.size()) {
    throw Error("precomputed pool: " + std::to_string(sims.size()) +
                " similarity rows, " + std::to_string(ids.size()) + " ids, " +
                std::to_string(token_lengths.size()) + " token lengths");
  }
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second) {
      throw Error("duplicate chunk id '" + ids[i] + "'");
    }
    if (token_lengths[i] < 1) {
      throw Error("chunk '" + ids[i] + "' has token length " +
                  std::to_string(token_lengths[i]) + " (must be >= 1)");
    }
  }
}

PrecomputedPool PrecomputedPool::from(const Query& query,
                                      const CandidatePool& pool,
                                      SimilarityMode mode) {
  std::vector<std::string> ids;
  std::vector<std::int64_t> lengths;
  for (const Chunk& c : pool) {
    ids.push_back(c.id);
    lengths.push_back(c.token_length);
  }
  return PrecomputedPool(SimilarityTable(query, pool, mode), std::move(ids),
                         std::move(lengths));
}

ScoreBreakdown objective(const SimilarityTable& sims,
                         std::span<const std::size_t> subset,
                         const ScoreWeights& weights) {
  weights.validate();
  check_subset(sims, subset);
  ScoreBreakdown out;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    out.relevance_sum += sims.query(subset[a]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      out.redundancy_sum += sims.pair(subset[a], subset[b]);
    }
  }
  out.objective =
      weights.alpha * out.relevance_sum - weights.beta * out.redundancy_sum;
  return out;
}

double marginal_gain(const SimilarityTable& sims, std::size_t candidate,
                     std::span<const std::size_t> subset,
                     const ScoreWeights& weights) {
  weights.validate();
  check_subset(sims, subset);
  if (candidate >= sims.size()) {
    throw Error("chunk index " + std::to_string(candidate) +
                " is not in pool of size " + std::to_string(sims.size()));
  }
  if (std::find(subset.begin(), subset.end(), candidate) != subset.end()) {
    throw Error("chunk #" + std::to_string(candidate) + " is already selected");
  }
  double overlap = 0.0;
  for (std::size_t c : subset) overlap += sims.pair(candidate, c);
  return weights.alpha * sims.query(candidate) - weights.beta * overlap;
}

}  // namespace adagres
