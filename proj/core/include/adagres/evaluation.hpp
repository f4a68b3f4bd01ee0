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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adagres/core.hpp"
#include "adagres/selection.hpp"

namespace adagres {

struct GoldReference {
  std::string query_id;
  std::set<std::string> gold_chunk_ids;
};

// |selected & gold| / |selected | gold| over chunk ids. Duplicated ids count
// once. Throws Error when `gold` is empty.
double iou(std::span<const std::string> selected, std::span<const std::string> gold);
double iou(const std::set<std::string>& selected, const std::set<std::string>& gold);

enum class Method { kAdagres, kTopkSameK };

enum class RecordStatus {
  kOk,
  kSkipped,  // greedy selected nothing, so there is no k to pair
  kError,    // missing pool or gold, or selection failed
};

struct EvalRecord {
  std::string query_id;
  Method method = Method::kAdagres;
  std::string setting;  // "adaptive", "adaptive-scaled" or the fixed beta
  std::size_t k_used = 0;
  double beta_used = 0.0;
  double iou = 0.0;
  double relevance_sum = 0.0;
  double redundancy_sum = 0.0;
  std::int64_t total_tokens = 0;
  RecordStatus status = RecordStatus::kOk;
  std::string message;
};

struct EvalCase {
  Query query;
  const CandidatePool* pool = nullptr;
  const GoldReference* gold = nullptr;
};

// For each case: resolve beta per cfg, run greedy to obtain k, run top-k with
// the same k, and emit one record per method. Per-case failures become
// kError records. Output is sorted by query id, AdaGReS row first.
std::vector<EvalRecord> run_comparison(std::span<const EvalCase> cases,
                                       const SelectionConfig& cfg);

// run_comparison once per fixed beta in `betas`, concatenated in grid order.
std::vector<EvalRecord> run_beta_sweep(std::span<const EvalCase> cases,
                                       const SelectionConfig& cfg,
                                       std::span<const double> betas);

struct AggregateRow {
  std::string setting;
  Method method = Method::kAdagres;
  std::size_t count = 0;
  double mean_iou = 0.0;
  double mean_relevance_sum = 0.0;
  double mean_redundancy_sum = 0.0;
  double mean_total_tokens = 0.0;
  // Extras beyond the per-method means.
  double p50_iou = 0.0;
  double p90_iou = 0.0;
};

struct ReportSummary {
  std::vector<AggregateRow> rows;  // one per (setting, method), first-seen order
  std::size_t records_written = 0;
  std::size_t records_failed = 0;
};

inline constexpr std::string_view kReportHeader =
    "query_id,method,beta,k,iou,relevance_sum,redundancy_sum,total_tokens";
inline constexpr std::string_view kSummaryHeader =
    "setting,method,n,mean_iou,mean_relevance_sum,mean_redundancy_sum,"
    "mean_total_tokens,p50_iou_extra,p90_iou_extra";

ReportSummary summarize(std::span<const EvalRecord> records);

// Writes the per-record CSV (kError records are left out) to `out`.
void write_records_csv(std::span<const EvalRecord> records, std::ostream& out);
void write_summary_csv(const ReportSummary& summary, std::ostream& out);

// Writes `path` and the aggregate table next to it as
// "<path stem>.summary.csv". Throws Error if either file cannot be written.
ReportSummary write_report(std::span<const EvalRecord> records,
                           const std::filesystem::path& path);

std::filesystem::path summary_path_for(const std::filesystem::path& report);

std::string_view to_string(Method method);
std::string_view to_string(RecordStatus status);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// Clustered synthetic corpora standing in for redundant real collections.
struct SyntheticPoolSpec {
  std::size_t n_chunks = 40;
  std::size_t dimension = 64;
  std::size_t n_clusters = 5;
  // Clusters the query points at; 0 means ceil(n_clusters / 2).
  std::size_t n_relevant_clusters = 0;
  double intra_cluster_sim_target = 0.9;
  std::int64_t token_min = 64;
  std::int64_t token_max = 192;
  // Weight of the r-th relevant cluster in the query direction is decay^r.
  double relevance_decay = 0.8;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  CandidatePool pool;
  Query query;
  GoldReference gold;
  std::vector<std::size_t> cluster_of;  // per pool index
  // Mean similarity over same-cluster pairs; NaN with no such pairs.
  double realized_intra_cluster_sim = 0.0;
};

// Deterministic in spec.seed. Members of a cluster are
// sqrt(t) * center + sqrt(1 - t) * noise with noise orthogonal to the center,
// so same-cluster pairs have expected similarity t. Gold holds the most
// query-similar member of each relevant cluster. Throws Error when `spec`
// is out of domain or the realized intra-cluster mean misses t by more than
// 0.05.
SyntheticCorpus generate_synthetic(const SyntheticPoolSpec& spec);

}  // namespace adagres
