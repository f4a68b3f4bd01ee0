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

#include "adagres/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "adagres/selection.hpp"

namespace adagres {
namespace {

// Objective value and token count of every subset of a small pool, built by
// peeling off the lowest member: F(S) = F(S \ {x}) + gain(x | S \ {x}).
struct SubsetTable {
  std::vector<double> value;
  std::vector<std::int64_t> tokens;
};

SubsetTable tabulate_subsets(const PrecomputedPool& pool,
                             const ScoreWeights& weights) {
  const SimilarityTable& sims = pool.sims;
  const std::size_t n = pool.size();
  const std::uint32_t count = std::uint32_t{1} << n;
  SubsetTable table{std::vector<double>(count, 0.0),
                    std::vector<std::int64_t>(count, 0)};
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    const std::uint32_t rest = mask & (mask - 1);
    double overlap = 0.0;
    for (std::uint32_t r = rest; r != 0; r &= r - 1) {
      overlap += sims.pair(low, static_cast<std::size_t>(std::countr_zero(r)));
    }
    table.value[mask] = table.value[rest] + weights.alpha * sims.query(low) -
                        weights.beta * overlap;
    table.tokens[mask] = table.tokens[rest] + pool.token_lengths[low];
  }
  return table;
}

std::vector<std::string> sorted_ids(const PrecomputedPool& pool, std::uint32_t mask) {
  std::vector<std::string> ids;
  for (std::uint32_t m = mask; m != 0; m &= m - 1) {
    ids.push_back(pool.ids[static_cast<std::size_t>(std::countr_zero(m))]);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

double closed_form_gain(const SimilarityTable& sims, const ScoreWeights& weights,
                        std::size_t x, const std::vector<std::size_t>& members) {
  double overlap = 0.0;
  for (std::size_t c : members) overlap += sims.pair(x, c);
  return weights.alpha * sims.query(x) - weights.beta * overlap;
}

GapSearchResult exhaustive_gap(const PrecomputedPool& pool,
                               const ScoreWeights& weights,
                               std::optional<std::size_t> max_set_size) {
  const std::size_t n = pool.size();
  const SubsetTable table = tabulate_subsets(pool, weights);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;

  GapSearchResult out;
  out.exhaustive = true;
  for (std::uint32_t b = 0; b <= full; ++b) {
    if (max_set_size && static_cast<std::size_t>(std::popcount(b)) > *max_set_size) {
      continue;
    }
    for (std::size_t x = 0; x < n; ++x) {
      const std::uint32_t bit = std::uint32_t{1} << x;
      if (b & bit) continue;
      const double gain_b = table.value[b | bit] - table.value[b];
      // Walk every submask A of B, including B itself and the empty set.
      for (std::uint32_t a = b;; a = (a - 1) & b) {
        const double gain_a = table.value[a | bit] - table.value[a];
        out.gap = std::max(out.gap, gain_b - gain_a);
        ++out.triples;
        if (a == 0) break;
      }
    }
  }
  return out;
}

GapSearchResult sampled_gap(const PrecomputedPool& pool,
                            const ScoreWeights& weights,
                            const GapSearchOptions& options) {
  const SimilarityTable& sims = pool.sims;
  const std::size_t n = pool.size();
  std::size_t largest = n - 1;
  if (options.max_set_size) largest = std::min(largest, *options.max_set_size);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> size_of_b(0, largest);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  GapSearchResult out;
  std::vector<std::size_t> b_set;
  std::vector<std::size_t> a_set;
  for (std::size_t t = 0; t < options.trials; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t b_size = size_of_b(rng);
    b_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b_size));
    const std::size_t x = order[b_size];
    a_set.clear();
    for (std::size_t c : b_set) {
      if (coin(rng)) a_set.push_back(c);
    }
    const double gap = closed_form_gain(sims, weights, x, b_set) -
                       closed_form_gain(sims, weights, x, a_set);
    out.gap = std::max(out.gap, gap);
    ++out.triples;
  }
  return out;
}

}  // namespace

OptimumResult exact_optimum(const PrecomputedPool& pool,
                            const ScoreWeights& weights,
                            std::int64_t token_budget) {
  weights.validate();
  if (pool.size() > kMaxExactPoolSize) {
    throw Error("exact optimum supports at most " +
                std::to_string(kMaxExactPoolSize) + " chunks, pool has " +
                std::to_string(pool.size()) +
                "; use the sampled gap analysis or a smaller synthetic pool");
  }
  if (token_budget < 1) throw Error("token budget must be >= 1");

  const SubsetTable table = tabulate_subsets(pool, weights);

  std::uint32_t best = 0;
  std::vector<std::string> best_ids;
  for (std::uint32_t mask = 1; mask < table.value.size(); ++mask) {
    if (table.tokens[mask] > token_budget) continue;
    if (table.value[mask] > table.value[best]) {
      best = mask;
      best_ids = sorted_ids(pool, mask);
    } else if (table.value[mask] == table.value[best]) {
      auto ids = sorted_ids(pool, mask);
      if (ids < best_ids) {
        best = mask;
        best_ids = std::move(ids);
      }
    }
  }

  OptimumResult out;
  for (std::uint32_t m = best; m != 0; m &= m - 1) {
    out.subset.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  out.ids = std::move(best_ids);
  out.value = objective(pool.sims, out.subset, weights).objective;
  return out;
}

OptimumResult exact_optimum(const Query& query, const CandidatePool& pool,
                            const ScoreWeights& weights, std::int64_t token_budget,
                            SimilarityMode mode) {
  check_compatible(query, pool);
  if (pool.size() > kMaxExactPoolSize) {
    throw Error("exact optimum supports at most " +
                std::to_string(kMaxExactPoolSize) + " chunks, pool has " +
                std::to_string(pool.size()) +
                "; use the sampled gap analysis or a smaller synthetic pool");
  }
  OptimumResult out =
      exact_optimum(PrecomputedPool::from(query, pool, mode), weights, token_budget);
  // Report the value through the embedding path as well.
  out.value = objective(query, pool, out.subset, weights, mode).objective;
  return out;
}

GapSearchResult search_submodularity_gap(const PrecomputedPool& pool,
                                         const ScoreWeights& weights,
                                         const GapSearchOptions& options) {
  if (pool.size() == 0) throw Error("candidate pool is empty");
  weights.validate();
  if (pool.size() <= options.exhaustive_limit &&
      pool.size() <= kMaxExactPoolSize) {
    return exhaustive_gap(pool, weights, options.max_set_size);
  }
  return sampled_gap(pool, weights, options);
}

GapSearchResult search_submodularity_gap(const Query& query,
                                         const CandidatePool& pool,
                                         const ScoreWeights& weights,
                                         const GapSearchOptions& options) {
  check_compatible(query, pool);
  return search_submodularity_gap(
      PrecomputedPool::from(query, pool, options.similarity), weights, options);
}

double empirical_submodularity_gap(const Query& query, const CandidatePool& pool,
                                   const ScoreWeights& weights,
                                   std::size_t trials, std::uint64_t seed,
                                   SimilarityMode mode) {
  if (pool.size() < 3) {
    throw Error("submodularity gap needs at least 3 chunks, pool has " +
                std::to_string(pool.size()));
  }
  GapSearchOptions options;
  options.trials = trials;
  options.seed = seed;
  options.similarity = mode;
  return search_submodularity_gap(query, pool, weights, options).gap;
}

std::size_t max_feasible_cardinality(std::span<const std::int64_t> token_lengths,
                                     std::int64_t token_budget) {
  std::vector<std::int64_t> lengths(token_lengths.begin(), token_lengths.end());
  std::sort(lengths.begin(), lengths.end());
  std::size_t k = 0;
  std::int64_t used = 0;
  for (std::int64_t len : lengths) {
    if (used + len > token_budget) break;
    used += len;
    ++k;
  }
  return k;
}

std::size_t max_feasible_cardinality(const CandidatePool& pool,
                                     std::int64_t token_budget) {
  std::vector<std::int64_t> lengths;
  lengths.reserve(pool.size());
  for (const Chunk& c : pool) lengths.push_back(c.token_length);
  return max_feasible_cardinality(lengths, token_budget);
}

EpsilonBound epsilon_bound(const PrecomputedPool& pool, double beta,
                           std::int64_t token_budget) {
  if (pool.size() == 0) throw Error("candidate pool is empty");
  if (!(beta >= 0.0)) throw Error("beta must be >= 0");
  EpsilonBound out;
  out.delta_max = std::max(0.0, pool.sims.max_pair());
  out.k_max = max_feasible_cardinality(pool.token_lengths, token_budget);
  out.epsilon = beta * static_cast<double>(out.k_max) * out.delta_max;
  return out;
}

EpsilonBound epsilon_bound(const CandidatePool& pool, double beta,
                           std::int64_t token_budget, SimilarityMode mode) {
  if (pool.empty()) throw Error("candidate pool is empty");
  if (!(beta >= 0.0)) throw Error("beta must be >= 0");
  EpsilonBound out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      out.delta_max = std::max(
          out.delta_max, similarity(pool[i].embedding, pool[j].embedding, mode));
    }
  }
  out.k_max = max_feasible_cardinality(pool, token_budget);
  out.epsilon = beta * static_cast<double>(out.k_max) * out.delta_max;
  return out;
}

AnalysisReport check_greedy_guarantee(const PrecomputedPool& pool,
                                      const ScoreWeights& weights,
                                      std::int64_t token_budget,
                                      const GuaranteeOptions& options) {
  weights.validate();

  SelectionConfig cfg;
  cfg.weights = weights;
  cfg.token_budget = token_budget;
  cfg.beta_policy = BetaPolicy::kFixed;
  cfg.top_n = pool.size();
  const SelectionResult greedy = greedy_select(pool, cfg, weights.beta);
  const OptimumResult opt = exact_optimum(pool, weights, token_budget);
  const EpsilonBound bound = epsilon_bound(pool, weights.beta, token_budget);

  GapSearchOptions gap_options;
  gap_options.trials = options.gap_trials;
  gap_options.seed = options.seed;
  gap_options.max_set_size = bound.k_max;

  AnalysisReport report;
  report.beta = weights.beta;
  report.similarity = options.similarity;
  report.opt_value = opt.value;
  report.opt_subset = opt.ids;
  report.greedy_value = greedy.objective_value;
  report.greedy_subset = greedy.ids();
  report.epsilon_empirical =
      search_submodularity_gap(pool, weights, gap_options).gap;
  report.epsilon_bound = bound.epsilon;
  report.delta_max = bound.delta_max;
  report.k_max = bound.k_max;
  const double inv_e = 1.0 / std::numbers::e;
  report.guarantee_rhs = (1.0 - inv_e) * opt.value -
                         static_cast<double>(bound.k_max) * bound.epsilon * inv_e;
  report.guarantee_satisfied = report.greedy_value >= report.guarantee_rhs - 1e-9;
  return report;
}

AnalysisReport check_greedy_guarantee(const Query& query,
                                      const CandidatePool& pool,
                                      const ScoreWeights& weights,
                                      std::int64_t token_budget,
                                      const GuaranteeOptions& options) {
  check_compatible(query, pool);
  if (pool.size() > kMaxExactPoolSize) {
    throw Error("guarantee check enumerates every subset and accepts at most " +
                std::to_string(kMaxExactPoolSize) + " chunks, pool has " +
                std::to_string(pool.size()));
  }
  const PrecomputedPool precomputed =
      PrecomputedPool::from(query, pool, options.similarity);
  AnalysisReport report =
      check_greedy_guarantee(precomputed, weights, token_budget, options);
  return report;
}

}  // namespace adagres
