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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "adagres/evaluation.hpp"

namespace adagres {
namespace {

constexpr double kRealizedTolerance = 0.05;

std::vector<double> gaussian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(d);
  for (double& x : v) x = normal(rng);
  return v;
}

void scale_to_unit(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
}

// Unit vector orthogonal to `center`; redrawn in the (measure-zero) case the
// projection vanishes.
std::vector<double> orthogonal_noise(const std::vector<double>& center,
                                     std::mt19937_64& rng) {
  for (;;) {
    std::vector<double> v = gaussian(center.size(), rng);
    double along = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) along += v[i] * center[i];
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= along * center[i];
      sq += v[i] * v[i];
    }
    if (sq > 1e-12) {
      scale_to_unit(v);
      return v;
    }
  }
}

std::string chunk_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%04zu", i);
  return buf;
}

void validate(const SyntheticPoolSpec& spec) {
  if (spec.n_chunks < 1) throw Error("synthetic pool needs at least one chunk");
  if (spec.dimension < 2) throw Error("synthetic dimension must be >= 2");
  if (spec.n_clusters < 1 || spec.n_clusters > spec.n_chunks) {
    throw Error("cluster count must be in [1, n_chunks]");
  }
  if (spec.n_relevant_clusters > spec.n_clusters) {
    throw Error("relevant cluster count exceeds cluster count");
  }
  if (!(spec.intra_cluster_sim_target >= 0.0 &&
        spec.intra_cluster_sim_target <= 1.0)) {
    throw Error("intra-cluster similarity target must be in [0, 1]");
  }
  if (spec.token_min < 1 || spec.token_min > spec.token_max) {
    throw Error("token length range must satisfy 1 <= min <= max");
  }
  if (!(spec.relevance_decay > 0.0 && spec.relevance_decay <= 1.0)) {
    throw Error("relevance decay must be in (0, 1]");
  }
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticPoolSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);

  std::vector<std::vector<double>> centers;
  centers.reserve(spec.n_clusters);
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    centers.push_back(gaussian(spec.dimension, rng));
    scale_to_unit(centers.back());
  }

  std::vector<std::size_t> cluster_of(spec.n_chunks);
  for (std::size_t i = 0; i < spec.n_chunks; ++i) {
    cluster_of[i] = i % spec.n_clusters;
  }
  std::shuffle(cluster_of.begin(), cluster_of.end(), rng);

  const double along = std::sqrt(spec.intra_cluster_sim_target);
  const double across = std::sqrt(1.0 - spec.intra_cluster_sim_target);
  std::uniform_int_distribution<std::int64_t> tokens(spec.token_min,
                                                     spec.token_max);

  std::vector<Chunk> chunks;
  chunks.reserve(spec.n_chunks);
  for (std::size_t i = 0; i < spec.n_chunks; ++i) {
    const auto& center = centers[cluster_of[i]];
    const std::vector<double> noise = orthogonal_noise(center, rng);
    std::vector<double> v(spec.dimension);
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = along * center[j] + across * noise[j];
    }
    const std::string id = chunk_id(i);
    chunks.push_back(Chunk{id, Embedding::normalize(std::span<const double>(v), id),
                           tokens(rng), std::nullopt});
  }
  CandidatePool pool(std::move(chunks));

  const std::size_t relevant = spec.n_relevant_clusters > 0
                                   ? spec.n_relevant_clusters
                                   : (spec.n_clusters + 1) / 2;
  std::vector<double> q(spec.dimension, 0.0);
  double weight = 1.0;
  for (std::size_t r = 0; r < relevant; ++r) {
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += weight * centers[r][j];
    weight *= spec.relevance_decay;
  }
  SyntheticCorpus corpus{
      std::move(pool),
      Query{"q0", Embedding::normalize(std::span<const double>(q), "q0"),
            std::nullopt},
      GoldReference{"q0", {}},
      std::move(cluster_of),
      0.0};

  for (std::size_t r = 0; r < relevant; ++r) {
    std::optional<std::size_t> best;
    double best_sim = 0.0;
    for (std::size_t i = 0; i < spec.n_chunks; ++i) {
      if (corpus.cluster_of[i] != r) continue;
      const double s = sim(corpus.query.embedding, corpus.pool[i].embedding);
      if (!best || s > best_sim) {
        best = i;
        best_sim = s;
      }
    }
    if (best) corpus.gold.gold_chunk_ids.insert(corpus.pool[*best].id);
  }

  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < spec.n_chunks; ++i) {
    for (std::size_t j = i + 1; j < spec.n_chunks; ++j) {
      if (corpus.cluster_of[i] != corpus.cluster_of[j]) continue;
      total += sim(corpus.pool[i].embedding, corpus.pool[j].embedding);
      ++pairs;
    }
  }
  corpus.realized_intra_cluster_sim =
      pairs > 0 ? total / static_cast<double>(pairs)
                : std::numeric_limits<double>::quiet_NaN();
  if (pairs > 0 && std::abs(corpus.realized_intra_cluster_sim -
                            spec.intra_cluster_sim_target) > kRealizedTolerance) {
    throw Error("infeasible synthetic spec: realized intra-cluster similarity " +
                format_double(corpus.realized_intra_cluster_sim) +
                " is more than " + format_double(kRealizedTolerance) +
                " from target " + format_double(spec.intra_cluster_sim_target));
  }
  return corpus;
}

}  // namespace adagres
