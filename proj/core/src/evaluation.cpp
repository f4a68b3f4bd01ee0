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

#include "adagres/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <utility>

#include "adagres/calibration.hpp"
#include "adagres/scoring.hpp"

namespace adagres {
namespace {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string setting_label(const SelectionConfig& cfg) {
  if (cfg.beta_policy == BetaPolicy::kFixed) return format_double(cfg.weights.beta);
  return std::string(to_string(cfg.beta_policy));
}

EvalRecord measure(const EvalCase& c, const SelectionConfig& cfg, Method method,
                   const SelectionResult& result, double beta,
                   const std::string& setting) {
  EvalRecord r;
  r.query_id = c.query.id;
  r.method = method;
  r.setting = setting;
  r.k_used = result.selected.size();
  r.beta_used = beta;
  const Subset chosen = result.indices();
  const std::vector<std::string> ids = result.ids();
  const std::vector<std::string> gold(c.gold->gold_chunk_ids.begin(),
                                      c.gold->gold_chunk_ids.end());
  r.iou = iou(ids, gold);
  r.relevance_sum = relevance_sum(c.query, *c.pool, chosen, cfg.similarity);
  r.redundancy_sum = redundancy_sum(*c.pool, chosen, cfg.similarity);
  r.total_tokens = result.total_tokens;
  return r;
}

EvalRecord failure(const EvalCase& c, const std::string& setting,
                   std::string message) {
  EvalRecord r;
  r.query_id = c.query.id;
  r.setting = setting;
  r.status = RecordStatus::kError;
  r.message = std::move(message);
  return r;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

}  // namespace

double iou(const std::set<std::string>& selected,
           const std::set<std::string>& gold) {
  if (gold.empty()) throw Error("gold set is empty");
  std::size_t common = 0;
  for (const auto& id : selected) common += gold.count(id);
  const std::size_t uni = selected.size() + gold.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double iou(std::span<const std::string> selected,
           std::span<const std::string> gold) {
  return iou(std::set<std::string>(selected.begin(), selected.end()),
             std::set<std::string>(gold.begin(), gold.end()));
}

std::vector<EvalRecord> run_comparison(std::span<const EvalCase> cases,
                                       const SelectionConfig& cfg) {
  const std::string setting = setting_label(cfg);
  std::vector<EvalRecord> records;
  records.reserve(2 * cases.size());

  for (const EvalCase& c : cases) {
    if (c.pool == nullptr) {
      records.push_back(failure(c, setting, "no candidate pool for query"));
      continue;
    }
    if (c.gold == nullptr || c.gold->gold_chunk_ids.empty()) {
      records.push_back(failure(c, setting, "no gold reference for query"));
      continue;
    }
    try {
      const ResolvedBeta resolved = resolve_beta(c.query, *c.pool, cfg);
      const SelectionResult greedy =
          greedy_select(c.query, *c.pool, cfg, resolved.beta);
      const std::size_t k = greedy.selected.size();
      if (k == 0) {
        for (Method m : {Method::kAdagres, Method::kTopkSameK}) {
          EvalRecord r;
          r.query_id = c.query.id;
          r.method = m;
          r.setting = setting;
          r.beta_used = resolved.beta;
          r.status = RecordStatus::kSkipped;
          r.message = "greedy selected no chunks";
          records.push_back(std::move(r));
        }
        continue;
      }
      const SelectionResult baseline =
          topk_select(c.query, *c.pool, k, cfg.token_budget);
      records.push_back(
          measure(c, cfg, Method::kAdagres, greedy, resolved.beta, setting));
      records.push_back(
          measure(c, cfg, Method::kTopkSameK, baseline, resolved.beta, setting));
    } catch (const Error& e) {
      records.push_back(failure(c, setting, e.what()));
    }
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const EvalRecord& a, const EvalRecord& b) {
                     return a.query_id < b.query_id;
                   });
  return records;
}

std::vector<EvalRecord> run_beta_sweep(std::span<const EvalCase> cases,
                                       const SelectionConfig& cfg,
                                       std::span<const double> betas) {
  std::vector<EvalRecord> all;
  for (double beta : betas) {
    SelectionConfig fixed = cfg;
    fixed.beta_policy = BetaPolicy::kFixed;
    fixed.weights.beta = beta;
    auto part = run_comparison(cases, fixed);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

ReportSummary summarize(std::span<const EvalRecord> records) {
  ReportSummary summary;
  std::map<std::pair<std::string, Method>, std::size_t> slot;
  std::vector<std::vector<double>> ious;

  for (const EvalRecord& r : records) {
    if (r.status == RecordStatus::kError) {
      ++summary.records_failed;
      continue;
    }
    ++summary.records_written;
    auto key = std::make_pair(r.setting, r.method);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, summary.rows.size()).first;
      AggregateRow row;
      row.setting = r.setting;
      row.method = r.method;
      summary.rows.push_back(row);
      ious.emplace_back();
    }
    AggregateRow& row = summary.rows[it->second];
    ++row.count;
    row.mean_iou += r.iou;
    row.mean_relevance_sum += r.relevance_sum;
    row.mean_redundancy_sum += r.redundancy_sum;
    row.mean_total_tokens += static_cast<double>(r.total_tokens);
    ious[it->second].push_back(r.iou);
  }

  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    AggregateRow& row = summary.rows[i];
    const auto n = static_cast<double>(row.count);
    row.mean_iou /= n;
    row.mean_relevance_sum /= n;
    row.mean_redundancy_sum /= n;
    row.mean_total_tokens /= n;
    row.p50_iou = percentile(ious[i], 0.5);
    row.p90_iou = percentile(ious[i], 0.9);
  }
  return summary;
}

void write_records_csv(std::span<const EvalRecord> records, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const EvalRecord& r : records) {
    if (r.status == RecordStatus::kError) continue;
    out << csv_field(r.query_id) << ',' << to_string(r.method) << ','
        << format_double(r.beta_used) << ',' << r.k_used << ','
        << format_double(r.iou) << ',' << format_double(r.relevance_sum) << ','
        << format_double(r.redundancy_sum) << ',' << r.total_tokens << '\n';
  }
}

void write_summary_csv(const ReportSummary& summary, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const AggregateRow& row : summary.rows) {
    out << csv_field(row.setting) << ',' << to_string(row.method) << ','
        << row.count << ',' << format_double(row.mean_iou) << ','
        << format_double(row.mean_relevance_sum) << ','
        << format_double(row.mean_redundancy_sum) << ','
        << format_double(row.mean_total_tokens) << ','
        << format_double(row.p50_iou) << ',' << format_double(row.p90_iou)
        << '\n';
  }
}

std::filesystem::path summary_path_for(const std::filesystem::path& report) {
  return report.parent_path() /
         (report.stem().string() + ".summary.csv");
}

ReportSummary write_report(std::span<const EvalRecord> records,
                           const std::filesystem::path& path) {
  ReportSummary summary = summarize(records);

  std::ofstream report(path);
  if (!report) throw Error("cannot write report to '" + path.string() + "'");
  write_records_csv(records, report);
  if (!report.flush()) throw Error("failed writing '" + path.string() + "'");

  const auto side = summary_path_for(path);
  std::ofstream table(side);
  if (!table) throw Error("cannot write summary to '" + side.string() + "'");
  write_summary_csv(summary, table);
  if (!table.flush()) throw Error("failed writing '" + side.string() + "'");
  return summary;
}

std::string_view to_string(Method method) {
  return method == Method::kAdagres ? "adagres" : "topk_same_k";
}

std::string_view to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::kOk: return "ok";
    case RecordStatus::kSkipped: return "skipped";
    case RecordStatus::kError: return "error";
  }
  return "unknown";
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace adagres
