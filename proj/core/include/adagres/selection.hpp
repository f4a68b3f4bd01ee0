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
#include <string>
#include <string_view>
#include <vector>

#include "adagres/core.hpp"
#include "adagres/scoring.hpp"

namespace adagres {

enum class BetaPolicy {
  kFixed,           // use SelectionConfig::weights.beta as given
  kAdaptive,        // closed-form beta*, clipped
  kAdaptiveScaled,  // lambda * beta* + beta_zero, clipped
};

// How many pairwise terms the calibration assumes sit between a boundary
// candidate and the expected selected set.
enum class BoundaryConvention {
  kFullPairCount,  // (k - 1) * E[sim(x, y)]
  kHalfPairCount,  // (k - 1) / 2 * E[sim(x, y)]  (default)
};

struct BetaClip {
  double min = 0.0;
  double max = 0.0;
};

struct SelectionConfig {
  ScoreWeights weights;
  std::int64_t token_budget = 512;
  BetaPolicy beta_policy = BetaPolicy::kAdaptive;
  std::size_t top_n = 100;
  double stability_epsilon = 1e-6;
  // Unset means [0, 10 * alpha].
  std::optional<BetaClip> beta_clip;
  std::uint64_t seed = 0;

  double lambda = 1.0;
  double beta_zero = 0.0;
  BoundaryConvention boundary = BoundaryConvention::kHalfPairCount;
  SimilarityMode similarity = SimilarityMode::kClamped;

  // Pairwise redundancy is averaged exactly up to this many candidates and
  // sampled above it.
  std::size_t exact_pair_limit = 256;
  std::size_t sampled_pairs = 2048;

  // Multiplies the resolved beta before selection. 1 leaves it untouched.
  double redundancy_scale = 1.0;

  BetaClip effective_beta_clip() const;

  // Throws Error on any out-of-domain field.
  void validate() const;
};

enum class StopReason {
  kBudgetExhausted,     // a positive-gain candidate remained but did not fit
  kNoPositiveGain,      // every remaining candidate had gain <= 0
  kPoolExhausted,       // nothing left to consider
  kCardinalityReached,  // top-k baseline reached k
};

struct SelectedChunk {
  std::string id;
  std::size_t index = 0;  // position in the input pool
  double marginal_gain = 0.0;
};

struct SelectionResult {
  std::vector<SelectedChunk> selected;  // in acceptance order
  std::int64_t total_tokens = 0;
  std::int64_t token_budget = 0;
  double objective_value = 0.0;
  double beta_used = 0.0;
  StopReason stop_reason = StopReason::kPoolExhausted;

  Subset indices() const;
  std::vector<std::string> ids() const;
};

// Budgeted greedy maximization of alpha * relevance - beta * redundancy.
//
// Each step takes the unselected candidate with the largest marginal gain
// among those that still fit in the budget and have strictly positive gain.
// Candidates that would overflow the budget are passed over rather than
// ending the run. Ties go to the higher query similarity, then to the earlier
// pool position. When cfg.top_n < pool.size() only the top_n most
// query-similar chunks are considered. `beta` is used as given;
// cfg.weights.beta and cfg.beta_policy are ignored here.
SelectionResult greedy_select(const Query& query, const CandidatePool& pool,
                              const SelectionConfig& cfg, double beta);

// Same selection over precomputed similarities.
SelectionResult greedy_select(const PrecomputedPool& pool,
                              const SelectionConfig& cfg, double beta);

// Similarity-only baseline: the k most query-similar chunks, ties by pool
// position, in descending similarity order. The budget is recorded, not
// enforced. Gains are the per-chunk query similarities.
SelectionResult topk_select(const Query& query, const CandidatePool& pool,
                            std::size_t k, std::int64_t token_budget);

std::string_view to_string(StopReason reason);
std::string_view to_string(BetaPolicy policy);
std::optional<BetaPolicy> parse_beta_policy(std::string_view text);

}  // namespace adagres
