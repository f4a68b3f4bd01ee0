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

// Test-only helpers. The oracle functions here work on plain vectors and
// never call into the library's scoring, selection or analysis code, so
// they can check those routines independently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adagres/core.hpp"
#include "adagres/scoring.hpp"

namespace adagres::testing {

using Matrix = std::vector<std::vector<double>>;

namespace oracle {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline std::vector<double> unit(std::vector<double> v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
  return v;
}

// F(S) evaluated straight from explicit similarity matrices.
inline double objective(const std::vector<double>& query_sims, const Matrix& pairs,
                        const std::vector<std::size_t>& subset, double alpha,
                        double beta) {
  double rel = 0.0;
  double red = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    rel += query_sims[subset[a]];
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      red += pairs[subset[a]][subset[b]];
    }
  }
  return alpha * rel - beta * red;
}

struct BruteForce {
  double value = 0.0;
  std::vector<std::size_t> subset;
};

// Recursive include/exclude enumeration of every budget-feasible subset.
inline BruteForce best_subset(const std::vector<double>& query_sims,
                              const Matrix& pairs,
                              const std::vector<std::int64_t>& lengths,
                              std::int64_t budget, double alpha, double beta) {
  BruteForce best;
  std::vector<std::size_t> current;
  auto recurse = [&](auto&& self, std::size_t i, std::int64_t used) -> void {
    if (i == query_sims.size()) {
      const double v = objective(query_sims, pairs, current, alpha, beta);
      if (v > best.value) {
        best.value = v;
        best.subset = current;
      }
      return;
    }
    self(self, i + 1, used);
    if (used + lengths[i] <= budget) {
      current.push_back(i);
      self(self, i + 1, used + lengths[i]);
      current.pop_back();
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace oracle

// Unit vectors whose Gram matrix is `gram` (Cholesky rows). `gram` must be
// positive definite with a unit diagonal.
inline std::vector<std::vector<double>> vectors_from_gram(const Matrix& gram) {
  const std::size_t n = gram.size();
  Matrix l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = gram[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = (i == j) ? std::sqrt(s) : s / l[j][j];
    }
  }
  return l;
}

inline Embedding embed(const std::vector<double>& v) {
  return Embedding::normalize(std::span<const double>(v));
}

inline Chunk make_chunk(std::string id, const std::vector<double>& v,
                        std::int64_t tokens = 1) {
  return Chunk{std::move(id), embed(v), tokens, std::nullopt};
}

inline Query make_query(const std::vector<double>& v, std::string id = "q") {
  return Query{std::move(id), embed(v), std::nullopt};
}

// Three chunks whose similarities cannot come from real unit vectors but are
// the standard hand-traced example: query similarities (0.9, 0.88, 0.6),
// pair similarities c1c2 = 0.95, c1c3 = c2c3 = 0.1.
inline PrecomputedPool hand_traced_pool(std::int64_t tokens_each = 1) {
  SimilarityTable sims({0.9, 0.88, 0.6},
                       {1.0, 0.95, 0.1,
                        0.95, 1.0, 0.1,
                        0.1, 0.1, 1.0});
  return PrecomputedPool(std::move(sims), {"c1", "c2", "c3"},
                         {tokens_each, tokens_each, tokens_each});
}

struct EmbeddedInstance {
  Query query;
  CandidatePool pool;
};

// A realizable neighbour of the hand-traced pool: q.c1 = 0.9, q.c2 = 0.88,
// q.c3 = 0.6, c1.c2 = 0.95 and c3 far from both.
inline EmbeddedInstance near_duplicate_instance() {
  const double y1 = std::sqrt(1.0 - 0.81);
  const double a2 = (0.95 - 0.9 * 0.88) / y1;
  const double b2 = std::sqrt(1.0 - 0.88 * 0.88 - a2 * a2);
  const double z3 = std::sqrt(1.0 - 0.36 - 0.25);
  std::vector<Chunk> chunks;
  chunks.push_back(make_chunk("c1", {0.9, y1, 0.0}));
  chunks.push_back(make_chunk("c2", {0.88, a2, b2}));
  chunks.push_back(make_chunk("c3", {0.6, -0.5, -z3}));
  return {make_query({1.0, 0.0, 0.0}), CandidatePool(std::move(chunks))};
}

struct RandomPoolSpec {
  std::size_t n = 10;
  std::size_t dimension = 8;
  std::int64_t token_min = 1;
  std::int64_t token_max = 1;
  // Non-negative coordinates make every similarity strictly positive.
  bool positive_orthant = false;
};

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t d,
                                         bool positive) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(d);
  for (double& x : v) x = positive ? std::abs(normal(rng)) + 1e-3 : normal(rng);
  return v;
}

inline EmbeddedInstance random_instance(std::mt19937_64& rng,
                                        const RandomPoolSpec& spec) {
  std::uniform_int_distribution<std::int64_t> tokens(spec.token_min, spec.token_max);
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < spec.n; ++i) {
    chunks.push_back(make_chunk("c" + std::to_string(i),
                                random_vector(rng, spec.dimension, spec.positive_orthant),
                                tokens(rng)));
  }
  return {Query{"q", embed(random_vector(rng, spec.dimension, spec.positive_orthant)),
                std::nullopt},
          CandidatePool(std::move(chunks))};
}

// Explicit similarity matrices of an instance, computed with oracle::dot.
struct ExplicitSims {
  std::vector<double> query;
  Matrix pairs;
  std::vector<std::int64_t> lengths;
};

inline ExplicitSims explicit_sims(const EmbeddedInstance& inst, bool clamp = true) {
  auto to_vec = [](const Embedding& e) {
    return std::vector<double>(e.values().begin(), e.values().end());
  };
  auto s = [&](const Embedding& a, const Embedding& b) {
    const double d = oracle::dot(to_vec(a), to_vec(b));
    return clamp ? std::max(0.0, d) : d;
  };
  ExplicitSims out;
  const std::size_t n = inst.pool.size();
  out.pairs.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    out.query.push_back(s(inst.query.embedding, inst.pool[i].embedding));
    out.lengths.push_back(inst.pool[i].token_length);
    for (std::size_t j = 0; j < n; ++j) {
      out.pairs[i][j] = s(inst.pool[i].embedding, inst.pool[j].embedding);
    }
  }
  return out;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adagres-" + tag + "-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace adagres::testing
