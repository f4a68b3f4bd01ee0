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

#include "adagres/calibration.hpp"

#include <algorithm>
#include <random>

namespace adagres {

PoolStats pool_stats(const Query& query, const CandidatePool& pool,
                     std::size_t top_n, std::int64_t token_budget,
                     std::uint64_t seed, const PoolStatsOptions& options) {
  check_compatible(query, pool);
  if (top_n < 1) throw Error("top_n must be >= 1");
  if (token_budget < 1) throw Error("token budget must be >= 1");

  Subset view = rank_by_relevance(query, pool);
  if (top_n < view.size()) view.resize(top_n);
  const std::size_t n = view.size();
  const SimilarityMode mode = options.similarity;

  PoolStats stats;
  stats.view_size = n;

  double tokens = 0.0;
  double query_sims = 0.0;
  for (std::size_t i : view) {
    tokens += static_cast<double>(pool[i].token_length);
    query_sims += similarity(query.embedding, pool[i].embedding, mode);
  }
  stats.mean_token_length = tokens / static_cast<double>(n);
  stats.expected_set_size =
      static_cast<double>(token_budget) / stats.mean_token_length;
  stats.mean_query_sim = query_sims / static_cast<double>(n);

  if (n < 2) {
    stats.pairwise_estimation = PairwiseEstimation::kExact;
    stats.pairs_used = 0;
    stats.mean_pairwise_sim = 0.0;
    return stats;
  }

  auto pair_sim = [&](std::size_t a, std::size_t b) {
    return similarity(pool[view[a]].embedding, pool[view[b]].embedding, mode);
  };

  if (n <= options.exact_pair_limit) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        total += pair_sim(a, b);
        ++count;
      }
    }
    stats.pairwise_estimation = PairwiseEstimation::kExact;
    stats.pairs_used = count;
    stats.mean_pairwise_sim = total / static_cast<double>(count);
    return stats;
  }

  if (options.sampled_pairs < 1) throw Error("sampled pair count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  double total = 0.0;
  for (std::size_t s = 0; s < options.sampled_pairs; ++s) {
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    total += pair_sim(a, b);
  }
  stats.pairwise_estimation = PairwiseEstimation::kSampled;
  stats.pairs_used = options.sampled_pairs;
  stats.mean_pairwise_sim = total / static_cast<double>(options.sampled_pairs);
  return stats;
}

double beta_star(const PoolStats& stats, double alpha, double stability_epsilon,
                 BoundaryConvention convention) {
  if (!(alpha > 0.0)) throw Error("alpha must be > 0");
  if (!(stability_epsilon > 0.0)) throw Error("stability epsilon must be > 0");
  const double k = stats.expected_set_size;
  if (!(k > 1.0)) return 0.0;
  const double pairs =
      convention == BoundaryConvention::kHalfPairCount ? (k - 1.0) / 2.0 : k - 1.0;
  const double value = alpha * stats.mean_query_sim /
                       (pairs * stats.mean_pairwise_sim + stability_epsilon);
  // Signed similarities can push the ratio negative; beta stays >= 0.
  return std::max(0.0, value);
}

BetaCalibration calibrate(const PoolStats& stats, const SelectionConfig& cfg,
                          double lambda, double beta_zero) {
  cfg.validate();
  BetaCalibration out;
  out.beta_star = beta_star(stats, cfg.weights.alpha, cfg.stability_epsilon,
                            cfg.boundary);
  out.lambda = lambda;
  out.beta_zero = beta_zero;
  const double raw = lambda * out.beta_star + beta_zero;
  const BetaClip clip = cfg.effective_beta_clip();
  out.beta_final = std::clamp(raw, clip.min, clip.max);
  out.clipped = out.beta_final != raw;
  return out;
}

ResolvedBeta resolve_beta(const Query& query, const CandidatePool& pool,
                          const SelectionConfig& cfg) {
  cfg.validate();
  ResolvedBeta out;
  if (cfg.beta_policy == BetaPolicy::kFixed) {
    out.beta = cfg.weights.beta * cfg.redundancy_scale;
    return out;
  }
  const PoolStatsOptions options{cfg.exact_pair_limit, cfg.sampled_pairs,
                                 cfg.similarity};
  out.stats = pool_stats(query, pool, cfg.top_n, cfg.token_budget, cfg.seed,
                         options);
  out.calibration = cfg.beta_policy == BetaPolicy::kAdaptive
                        ? calibrate(*out.stats, cfg)
                        : calibrate(*out.stats, cfg, cfg.lambda, cfg.beta_zero);
  out.beta = out.calibration->beta_final * cfg.redundancy_scale;
  return out;
}

SelectionResult select(const Query& query, const CandidatePool& pool,
                       const SelectionConfig& cfg) {
  const ResolvedBeta resolved = resolve_beta(query, pool, cfg);
  return greedy_select(query, pool, cfg, resolved.beta);
}

std::string_view to_string(PairwiseEstimation estimation) {
  return estimation == PairwiseEstimation::kExact ? "exact" : "sampled";
}

std::string_view to_string(BoundaryConvention convention) {
  return convention == BoundaryConvention::kHalfPairCount ? "eq7" : "eq6";
}

}  // namespace adagres
