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

#include "adagres/selection.hpp"

#include <algorithm>
#include <cmath>

namespace adagres {

BetaClip SelectionConfig::effective_beta_clip() const {
  if (beta_clip) return *beta_clip;
  return BetaClip{0.0, 10.0 * weights.alpha};
}

void SelectionConfig::validate() const {
  if (!(weights.alpha > 0.0)) {
    throw Error("alpha must be > 0, got " + std::to_string(weights.alpha));
  }
  if (beta_policy == BetaPolicy::kFixed && !(weights.beta >= 0.0)) {
    throw Error("beta must be >= 0, got " + std::to_string(weights.beta));
  }
  if (token_budget < 1) {
    throw Error("token budget must be >= 1, got " + std::to_string(token_budget));
  }
  if (top_n < 1) throw Error("top_n must be >= 1");
  if (!(stability_epsilon > 0.0)) {
    throw Error("stability epsilon must be > 0");
  }
  const BetaClip clip = effective_beta_clip();
  if (!(clip.min >= 0.0) || !(clip.min <= clip.max)) {
    throw Error("beta clip range must satisfy 0 <= min <= max");
  }
  if (!std::isfinite(lambda) || !std::isfinite(beta_zero)) {
    throw Error("lambda and beta0 must be finite");
  }
  if (sampled_pairs < 1) throw Error("sampled pair count must be >= 1");
  if (!(redundancy_scale >= 0.0)) throw Error("redundancy scale must be >= 0");
}

Subset SelectionResult::indices() const {
  Subset out;
  out.reserve(selected.size());
  for (const auto& s : selected) out.push_back(s.index);
  return out;
}

std::vector<std::string> SelectionResult::ids() const {
  std::vector<std::string> out;
  out.reserve(selected.size());
  for (const auto& s : selected) out.push_back(s.id);
  return out;
}

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error("beta must be finite and >= 0, got " + std::to_string(beta));
  }
}

// The greedy loop over `n` candidates. `relevance[i]` is sim(q, candidate i),
// `pair_sim(i, j)` the similarity between candidates, `length(i)` the token
// length and `accept(i, gain)` records an accepted candidate. Running overlap
// sums make each step O(n).
template <typename PairSim, typename Length, typename Accept>
StopReason run_greedy(std::size_t n, const std::vector<double>& relevance,
                      double alpha, double beta, std::int64_t budget,
                      PairSim&& pair_sim, Length&& length, Accept&& accept) {
  std::vector<double> overlap(n, 0.0);
  std::vector<bool> taken(n, false);
  std::int64_t used = 0;
  std::size_t accepted = 0;

  auto gain_of = [&](std::size_t i) {
    return alpha * relevance[i] - beta * overlap[i];
  };

  while (accepted < n) {
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i] || used + length(i) > budget) continue;
      const double g = gain_of(i);
      if (!(g > 0.0)) continue;
      // Candidates are visited in pool order, so strict comparisons keep the
      // earlier position on full ties.
      if (!best || g > best_gain ||
          (g == best_gain && relevance[i] > relevance[*best])) {
        best = i;
        best_gain = g;
      }
    }
    if (!best) break;

    const std::size_t pick = *best;
    taken[pick] = true;
    used += length(pick);
    ++accepted;
    accept(pick, best_gain);
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) overlap[i] += pair_sim(pick, i);
    }
  }

  if (accepted == n) return StopReason::kPoolExhausted;
  for (std::size_t i = 0; i < n; ++i) {
    if (!taken[i] && gain_of(i) > 0.0) return StopReason::kBudgetExhausted;
  }
  return StopReason::kNoPositiveGain;
}

// Top-n candidates by relevance, returned in ascending index order.
Subset prefilter(std::span<const double> relevance, std::size_t top_n) {
  Subset order(relevance.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return relevance[a] > relevance[b];
  });
  if (top_n < order.size()) order.resize(top_n);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

SelectionResult greedy_select(const Query& query, const CandidatePool& pool,
                              const SelectionConfig& cfg, double beta) {
  check_compatible(query, pool);
  cfg.validate();
  check_beta(beta);
  const SimilarityMode mode = cfg.similarity;

  Subset candidates = rank_by_relevance(query, pool);
  if (cfg.top_n < candidates.size()) candidates.resize(cfg.top_n);
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> relevance(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    relevance[i] = similarity(query.embedding, pool[candidates[i]].embedding, mode);
  }

  SelectionResult result;
  result.token_budget = cfg.token_budget;
  result.beta_used = beta;
  result.stop_reason = run_greedy(
      candidates.size(), relevance, cfg.weights.alpha, beta, cfg.token_budget,
      [&](std::size_t a, std::size_t b) {
        return similarity(pool[candidates[a]].embedding,
                          pool[candidates[b]].embedding, mode);
      },
      [&](std::size_t i) { return pool[candidates[i]].token_length; },
      [&](std::size_t i, double gain) {
        const Chunk& chunk = pool[candidates[i]];
        result.total_tokens += chunk.token_length;
        result.selected.push_back({chunk.id, candidates[i], gain});
      });

  result.objective_value =
      objective(query, pool, result.indices(),
                ScoreWeights{cfg.weights.alpha, beta}, mode)
          .objective;
  return result;
}

SelectionResult greedy_select(const PrecomputedPool& pool,
                              const SelectionConfig& cfg, double beta) {
  if (pool.size() == 0) throw Error("candidate pool is empty");
  cfg.validate();
  check_beta(beta);

  std::vector<double> all(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) all[i] = pool.sims.query(i);
  const Subset candidates = prefilter(all, cfg.top_n);
  std::vector<double> relevance(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    relevance[i] = all[candidates[i]];
  }

  SelectionResult result;
  result.token_budget = cfg.token_budget;
  result.beta_used = beta;
  result.stop_reason = run_greedy(
      candidates.size(), relevance, cfg.weights.alpha, beta, cfg.token_budget,
      [&](std::size_t a, std::size_t b) {
        return pool.sims.pair(candidates[a], candidates[b]);
      },
      [&](std::size_t i) { return pool.token_lengths[candidates[i]]; },
      [&](std::size_t i, double gain) {
        const std::size_t index = candidates[i];
        result.total_tokens += pool.token_lengths[index];
        result.selected.push_back({pool.ids[index], index, gain});
      });

  result.objective_value =
      objective(pool.sims, result.indices(), ScoreWeights{cfg.weights.alpha, beta})
          .objective;
  return result;
}

SelectionResult topk_select(const Query& query, const CandidatePool& pool,
                            std::size_t k, std::int64_t token_budget) {
  check_compatible(query, pool);
  if (k < 1) throw Error("k must be >= 1");

  Subset order = rank_by_relevance(query, pool);
  SelectionResult result;
  result.token_budget = token_budget;
  result.beta_used = 0.0;
  result.stop_reason = order.size() <= k ? StopReason::kPoolExhausted
                                         : StopReason::kCardinalityReached;
  if (order.size() > k) order.resize(k);

  for (std::size_t i : order) {
    const Chunk& chunk = pool[i];
    result.selected.push_back({chunk.id, i, sim(query.embedding, chunk.embedding)});
    result.total_tokens += chunk.token_length;
  }
  result.objective_value = relevance_sum(query, pool, order);
  return result;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kBudgetExhausted: return "budget_exhausted";
    case StopReason::kNoPositiveGain: return "no_positive_gain";
    case StopReason::kPoolExhausted: return "pool_exhausted";
    case StopReason::kCardinalityReached: return "cardinality_reached";
  }
  return "unknown";
}

std::string_view to_string(BetaPolicy policy) {
  switch (policy) {
    case BetaPolicy::kFixed: return "fixed";
    case BetaPolicy::kAdaptive: return "adaptive";
    case BetaPolicy::kAdaptiveScaled: return "adaptive-scaled";
  }
  return "unknown";
}

std::optional<BetaPolicy> parse_beta_policy(std::string_view text) {
  if (text == "fixed") return BetaPolicy::kFixed;
  if (text == "adaptive") return BetaPolicy::kAdaptive;
  if (text == "adaptive-scaled" || text == "adaptive_scaled") {
    return BetaPolicy::kAdaptiveScaled;
  }
  return std::nullopt;
}

}  // namespace adagres
