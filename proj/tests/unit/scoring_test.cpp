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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "adagres/scoring.hpp"
#include "test_support.hpp"

namespace adagres {
namespace {

using testing::make_chunk;
using testing::vectors_from_gram;

// Query in row 0, chunks after it.
testing::EmbeddedInstance from_gram(const testing::Matrix& gram) {
  const auto rows = vectors_from_gram(gram);
  std::vector<Chunk> chunks;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    chunks.push_back(make_chunk("c" + std::to_string(i), rows[i]));
  }
  return {testing::make_query(rows[0]), CandidatePool(std::move(chunks))};
}

// Random chain of distinct indices of length up to n.
Subset random_subset(std::mt19937_64& rng, std::size_t n) {
  Subset all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::uniform_int_distribution<std::size_t>(0, n)(rng));
  return all;
}

TEST(RelevanceSumTest, Examples) {
  const auto inst = from_gram({{1, 0.9, 0.8}, {0.9, 1, 0.5}, {0.8, 0.5, 1}});
  EXPECT_EQ(relevance_sum(inst.query, inst.pool, Subset{}), 0.0);
  EXPECT_NEAR(relevance_sum(inst.query, inst.pool, Subset{0}), 0.9, 1e-12);
  EXPECT_NEAR(relevance_sum(inst.query, inst.pool, Subset{0, 1}), 1.7, 1e-12);
}

TEST(RelevanceSumTest, RejectsIndicesOutsidePool) {
  const auto inst = testing::near_duplicate_instance();
  EXPECT_THROW(relevance_sum(inst.query, inst.pool, Subset{5}), Error);
  EXPECT_THROW(relevance_sum(inst.query, inst.pool, Subset{1, 1}), Error);
}

TEST(RedundancySumTest, Examples) {
  CandidatePool dup({make_chunk("a", {1, 2}), make_chunk("b", {1, 2})});
  EXPECT_EQ(redundancy_sum(dup, Subset{0}), 0.0);
  EXPECT_NEAR(redundancy_sum(dup, Subset{0, 1}), 1.0, 1e-12);

  const auto inst = from_gram(
      {{1, 0.3, 0.3, 0.3}, {0.3, 1, 0.5, 0.1}, {0.3, 0.5, 1, 0.1}, {0.3, 0.1, 0.1, 1}});
  EXPECT_NEAR(redundancy_sum(inst.pool, Subset{0, 1, 2}), 0.7, 1e-12);
}

TEST(ObjectiveTest, Examples) {
  const auto inst = from_gram({{1, 0.9, 0.8}, {0.9, 1, 0.5}, {0.8, 0.5, 1}});
  const ScoreBreakdown f =
      objective(inst.query, inst.pool, Subset{0, 1}, ScoreWeights{1.0, 0.5});
  EXPECT_NEAR(f.relevance_sum, 1.7, 1e-12);
  EXPECT_NEAR(f.redundancy_sum, 0.5, 1e-12);
  EXPECT_NEAR(f.objective, 1.45, 1e-12);

  EXPECT_EQ(objective(inst.query, inst.pool, Subset{}, ScoreWeights{1.0, 0.5}).objective,
            0.0);
  const ScoreBreakdown relevance_only =
      objective(inst.query, inst.pool, Subset{0, 1}, ScoreWeights{2.0, 0.0});
  EXPECT_DOUBLE_EQ(relevance_only.objective, 2.0 * relevance_only.relevance_sum);
}

TEST(ObjectiveTest, TableAndEmbeddingPathsAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 9});
    const auto pre = PrecomputedPool::from(inst.query, inst.pool);
    const Subset s = random_subset(rng, 9);
    const ScoreWeights w{1.3, 0.7};
    EXPECT_NEAR(objective(inst.query, inst.pool, s, w).objective,
                objective(pre.sims, s, w).objective, 1e-12);
  }
}

TEST(ObjectiveTest, MatchesOracleOnRandomSubsets) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 8});
    const auto ex = testing::explicit_sims(inst);
    const Subset s = random_subset(rng, 8);
    EXPECT_NEAR(objective(inst.query, inst.pool, s, ScoreWeights{1.0, 0.8}).objective,
                testing::oracle::objective(ex.query, ex.pairs, s, 1.0, 0.8), 1e-9);
  }
}

TEST(ObjectiveTest, RawModeKeepsNegativeSimilarities) {
  CandidatePool pool({make_chunk("a", {1, 0}), make_chunk("b", {-1, 0})});
  const Query q = testing::make_query({1, 0});
  EXPECT_NEAR(redundancy_sum(pool, Subset{0, 1}, SimilarityMode::kRaw), -1.0, 1e-12);
  EXPECT_EQ(redundancy_sum(pool, Subset{0, 1}), 0.0);
  EXPECT_NEAR(relevance_sum(q, pool, Subset{0, 1}, SimilarityMode::kRaw), 0.0, 1e-12);
}

TEST(MarginalGainTest, Examples) {
  const auto inst = testing::near_duplicate_instance();
  const ScoreWeights w{1.0, 1.0};
  EXPECT_NEAR(marginal_gain(inst.query, inst.pool, 0, Subset{}, w), 0.9, 1e-12);
  EXPECT_NEAR(marginal_gain(inst.query, inst.pool, 1, Subset{0}, w), -0.07, 1e-12);

  const auto table = testing::hand_traced_pool();
  EXPECT_NEAR(marginal_gain(table.sims, 1, Subset{0}, w), -0.07, 1e-12);
  EXPECT_NEAR(marginal_gain(table.sims, 2, Subset{0}, w), 0.5, 1e-12);
}

TEST(MarginalGainTest, DuplicateOfMemberIsNegativeForLargeBeta) {
  CandidatePool pool({make_chunk("a", {1, 1}), make_chunk("b", {1, 1})});
  const Query q = testing::make_query({1, 0});
  EXPECT_LT(marginal_gain(q, pool, 1, Subset{0}, ScoreWeights{1.0, 1.0}), 0.0);
}

TEST(MarginalGainTest, RejectsCandidateAlreadySelected) {
  const auto inst = testing::near_duplicate_instance();
  EXPECT_THROW(marginal_gain(inst.query, inst.pool, 0, Subset{0}, ScoreWeights{}), Error);
}

TEST(ScoreWeightsTest, Validation) {
  EXPECT_THROW((ScoreWeights{0.0, 0.0}.validate()), Error);
  EXPECT_THROW((ScoreWeights{1.0, -0.1}.validate()), Error);
  EXPECT_NO_THROW((ScoreWeights{1.0, 0.0}.validate()));
}

TEST(SimilarityTableTest, RejectsAsymmetricOrMisshapenInput) {
  EXPECT_THROW(SimilarityTable({0.5, 0.5}, {1, 0.2, 0.3, 1}), Error);
  EXPECT_THROW(SimilarityTable({0.5, 0.5}, {1, 0.2, 0.2}), Error);
  EXPECT_THROW(SimilarityTable({0.5}, {std::nan("")}), Error);
  EXPECT_EQ(SimilarityTable({0.5}, {1.0}).max_pair(), 0.0);
  EXPECT_NEAR(testing::hand_traced_pool().sims.max_pair(), 0.95, 1e-15);
}

TEST(RankByRelevanceTest, DescendingAndStable) {
  CandidatePool pool({make_chunk("a", {0, 1}), make_chunk("b", {1, 0}),
                      make_chunk("c", {1, 1}), make_chunk("d", {1, 0})});
  const Query q = testing::make_query({1, 0});
  EXPECT_EQ(rank_by_relevance(q, pool), (std::vector<std::size_t>{1, 3, 2, 0}));
}

// Property suites.

TEST(ScoringPropertyTest, TelescopingConsistency) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 10});
    const Subset chain = random_subset(rng, 10);
    const ScoreWeights w{1.0, std::uniform_real_distribution<double>(0, 2)(rng)};
    double total = 0.0;
    Subset prefix;
    for (std::size_t x : chain) {
      total += marginal_gain(inst.query, inst.pool, x, prefix, w);
      prefix.push_back(x);
    }
    EXPECT_NEAR(objective(inst.query, inst.pool, chain, w).objective, total, 1e-9);
  }
}

struct Triple {
  Subset a;
  Subset b;
  std::size_t x;
};

Triple random_triple(std::mt19937_64& rng, std::size_t n) {
  Subset all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t x = all.back();
  all.pop_back();
  Subset b(all.begin(),
           all.begin() + std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  Subset a;
  for (std::size_t i : b) {
    if (rng() & 1u) a.push_back(i);
  }
  return {a, b, x};
}

Subset with(Subset s, std::size_t x) {
  s.push_back(x);
  return s;
}

TEST(ScoringPropertyTest, RelevanceGainIsModular) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 9});
    const Triple t = random_triple(rng, 9);
    const double gain_a = relevance_sum(inst.query, inst.pool, with(t.a, t.x)) -
                          relevance_sum(inst.query, inst.pool, t.a);
    const double gain_b = relevance_sum(inst.query, inst.pool, with(t.b, t.x)) -
                          relevance_sum(inst.query, inst.pool, t.b);
    const ScoreWeights w{1.0, 0.0};
    EXPECT_EQ(marginal_gain(inst.query, inst.pool, t.x, t.a, w),
              marginal_gain(inst.query, inst.pool, t.x, t.b, w));
    EXPECT_NEAR(gain_a, gain_b, 1e-12);
  }
}

TEST(ScoringPropertyTest, RedundancyIsSupermodular) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 9});
    const Triple t = random_triple(rng, 9);
    const double inc_b =
        redundancy_sum(inst.pool, with(t.b, t.x)) - redundancy_sum(inst.pool, t.b);
    const double inc_a =
        redundancy_sum(inst.pool, with(t.a, t.x)) - redundancy_sum(inst.pool, t.a);
    EXPECT_GE(inc_b, inc_a - 1e-9);
  }
}

TEST(ScoringPropertyTest, GainDifferenceIdentity) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_instance(rng, {.n = 9});
    const auto ex = testing::explicit_sims(inst);
    const Triple t = random_triple(rng, 9);
    const double beta = std::uniform_real_distribution<double>(0, 3)(rng);
    const ScoreWeights w{1.0, beta};
    double expected = 0.0;
    for (std::size_t c : t.b) {
      if (std::find(t.a.begin(), t.a.end(), c) == t.a.end()) expected += ex.pairs[t.x][c];
    }
    expected *= beta;
    EXPECT_NEAR(marginal_gain(inst.query, inst.pool, t.x, t.a, w) -
                    marginal_gain(inst.query, inst.pool, t.x, t.b, w),
                expected, 1e-9);
  }
}

}  // namespace
}  // namespace adagres
