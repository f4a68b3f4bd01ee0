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
#include <string_view>

#include "adagres/core.hpp"
#include "adagres/selection.hpp"

namespace adagres {

enum class PairwiseEstimation { kExact, kSampled };

// Statistics of the top-N view of a pool that drive the adaptive beta.
struct PoolStats {
  double mean_token_length = 0.0;
  double expected_set_size = 0.0;  // token_budget / mean_token_length
  double mean_query_sim = 0.0;
  double mean_pairwise_sim = 0.0;  // over distinct pairs
  PairwiseEstimation pairwise_estimation = PairwiseEstimation::kExact;
  std::size_t pairs_used = 0;  // distinct pairs averaged, or samples drawn
  std::size_t view_size = 0;
};

struct PoolStatsOptions {
  std::size_t exact_pair_limit = 256;
  std::size_t sampled_pairs = 2048;
  SimilarityMode similarity = SimilarityMode::kClamped;
};

// Statistics over the top_n most query-similar chunks. The pairwise mean is
// exact when the view has at most exact_pair_limit chunks and is otherwise
// estimated from sampled_pairs uniformly drawn distinct pairs, seeded by
// `seed`. A one-chunk view reports a pairwise mean of 0.
PoolStats pool_stats(const Query& query, const CandidatePool& pool,
                     std::size_t top_n, std::int64_t token_budget,
                     std::uint64_t seed, const PoolStatsOptions& options = {});

// Closed-form beta that zeroes the expected gain of a candidate at the
// budget boundary:
//
//   beta* = alpha * E[sim(q, x)] / (m * E[sim(x, y)] + stability_epsilon)
//
// with m = (k - 1) / 2 under kHalfPairCount and m = k - 1 under
// kFullPairCount, k = expected_set_size. Returns 0 when k <= 1.
double beta_star(const PoolStats& stats, double alpha, double stability_epsilon,
                 BoundaryConvention convention = BoundaryConvention::kHalfPairCount);

struct BetaCalibration {
  double beta_star = 0.0;
  double lambda = 1.0;
  double beta_zero = 0.0;
  double beta_final = 0.0;  // clip(lambda * beta_star + beta_zero)
  bool clipped = false;
};

BetaCalibration calibrate(const PoolStats& stats, const SelectionConfig& cfg,
                          double lambda = 1.0, double beta_zero = 0.0);

struct ResolvedBeta {
  double beta = 0.0;  // after redundancy_scale
  std::optional<PoolStats> stats;
  std::optional<BetaCalibration> calibration;
};

// Applies cfg.beta_policy. kAdaptive calibrates with lambda = 1, beta0 = 0;
// kAdaptiveScaled uses cfg.lambda and cfg.beta_zero.
ResolvedBeta resolve_beta(const Query& query, const CandidatePool& pool,
                          const SelectionConfig& cfg);

// resolve_beta followed by greedy_select.
SelectionResult select(const Query& query, const CandidatePool& pool,
                       const SelectionConfig& cfg);

std::string_view to_string(PairwiseEstimation estimation);
std::string_view to_string(BoundaryConvention convention);

}  // namespace adagres
