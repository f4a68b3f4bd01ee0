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
#include <string>
#include <vector>

#include "adagres/core.hpp"
#include "adagres/scoring.hpp"

namespace adagres {

// Largest pool the exhaustive optimizer accepts (2^20 subsets).
inline constexpr std::size_t kMaxExactPoolSize = 20;

struct OptimumResult {
  double value = 0.0;
  Subset subset;                 // ascending pool indices
  std::vector<std::string> ids;  // sorted
};

// Best budget-feasible subset (the empty set included) by exhaustive
// enumeration. Exact value ties go to the lexicographically smallest sorted
// id list. Throws Error for pools larger than kMaxExactPoolSize.
OptimumResult exact_optimum(const PrecomputedPool& pool,
                            const ScoreWeights& weights,
                            std::int64_t token_budget);
OptimumResult exact_optimum(const Query& query, const CandidatePool& pool,
                            const ScoreWeights& weights, std::int64_t token_budget,
                            SimilarityMode mode = SimilarityMode::kClamped);

struct GapSearchOptions {
  std::size_t trials = 20000;
  std::uint64_t seed = 0;
  SimilarityMode similarity = SimilarityMode::kClamped;
  // Upper bound on |B|; unset means unrestricted.
  std::optional<std::size_t> max_set_size;
  // Pools up to this size are enumerated instead of sampled.
  std::size_t exhaustive_limit = 10;
};

struct GapSearchResult {
  double gap = 0.0;  // max over triples of [gain(x|B) - gain(x|A)]+
  std::size_t triples = 0;
  bool exhaustive = false;
};

// Largest violation of diminishing returns, max [gain(x|B) - gain(x|A)]+ over
// A subset of B, x not in B. Requires at least 3 chunks.
GapSearchResult search_submodularity_gap(const PrecomputedPool& pool,
                                         const ScoreWeights& weights,
                                         const GapSearchOptions& options = {});
GapSearchResult search_submodularity_gap(const Query& query,
                                         const CandidatePool& pool,
                                         const ScoreWeights& weights,
                                         const GapSearchOptions& options = {});

double empirical_submodularity_gap(const Query& query, const CandidatePool& pool,
                                   const ScoreWeights& weights,
                                   std::size_t trials, std::uint64_t seed,
                                   SimilarityMode mode = SimilarityMode::kClamped);

// Most chunks that fit in `token_budget`, packing shortest first.
std::size_t max_feasible_cardinality(std::span<const std::int64_t> token_lengths,
                                     std::int64_t token_budget);
std::size_t max_feasible_cardinality(const CandidatePool& pool,
                                     std::int64_t token_budget);

struct EpsilonBound {
  double epsilon = 0.0;    // beta * k * delta
  double delta_max = 0.0;  // largest pairwise similarity, floored at 0
  std::size_t k_max = 0;
};

EpsilonBound epsilon_bound(const PrecomputedPool& pool, double beta,
                           std::int64_t token_budget);
EpsilonBound epsilon_bound(const CandidatePool& pool, double beta,
                           std::int64_t token_budget,
                           SimilarityMode mode = SimilarityMode::kClamped);

struct AnalysisReport {
  double beta = 0.0;
  SimilarityMode similarity = SimilarityMode::kClamped;
  double opt_value = 0.0;
  std::vector<std::string> opt_subset;
  double greedy_value = 0.0;
  std::vector<std::string> greedy_subset;
  double epsilon_empirical = 0.0;
  double epsilon_bound = 0.0;
  double delta_max = 0.0;
  std::size_t k_max = 0;
  double guarantee_rhs = 0.0;  // (1 - 1/e) * OPT - k * epsilon / e
  bool guarantee_satisfied = false;
};

struct GuaranteeOptions {
  std::size_t gap_trials = 20000;
  std::uint64_t seed = 0;
  // Similarity used to build the table from embeddings. The precomputed
  // overload only records it in the report.
  SimilarityMode similarity = SimilarityMode::kClamped;
};

// Runs greedy selection and the exhaustive optimum on the same instance and
// checks greedy >= (1 - 1/e) * OPT - k * epsilon / e with
// epsilon = beta * k * delta. The gap search is restricted to |B| <= k.
AnalysisReport check_greedy_guarantee(const PrecomputedPool& pool,
                                      const ScoreWeights& weights,
                                      std::int64_t token_budget,
                                      const GuaranteeOptions& options = {});
AnalysisReport check_greedy_guarantee(const Query& query,
                                      const CandidatePool& pool,
                                      const ScoreWeights& weights,
                                      std::int64_t token_budget,
                                      const GuaranteeOptions& options = {});

}  // namespace adagres
