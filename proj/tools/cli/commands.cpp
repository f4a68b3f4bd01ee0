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

#include "cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adagres/analysis.hpp"
#include "adagres/calibration.hpp"
#include "adagres/evaluation.hpp"
#include "adagres/io.hpp"
#include "adagres/selection.hpp"
#include "json.hpp"

namespace adagres::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Flags shared by the selection-driven subcommands.
struct SelectionFlags {
  double alpha = 1.0;
  std::optional<double> beta;
  std::optional<std::string> beta_policy;
  std::int64_t budget = 512;
  std::size_t top_n = 100;
  double lambda = 1.0;
  double beta_zero = 0.0;
  std::vector<double> beta_clip;
  std::string boundary = "eq7";
  bool raw_sim = false;
  double stability_epsilon = 1e-6;
  double redundancy_scale = 1.0;
};

struct Paths {
  std::string chunks;
  std::string queries;
  std::string gold;
  std::string out;
};

void add_selection_flags(CLI::App* cmd, SelectionFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Relevance weight (> 0)")->capture_default_str();
  cmd->add_option("--beta", f.beta, "Fixed redundancy weight (>= 0)");
  cmd->add_option("--beta-policy", f.beta_policy,
                  "fixed, adaptive (default) or adaptive-scaled")
      ->check(CLI::IsMember({"fixed", "adaptive", "adaptive-scaled"}));
  cmd->add_option("--budget", f.budget, "Token budget")->capture_default_str();
  cmd->add_option("--top-n", f.top_n, "Candidate pre-filter size")->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Scale on the calibrated beta")->capture_default_str();
  cmd->add_option("--beta0", f.beta_zero, "Bias on the calibrated beta")->capture_default_str();
  cmd->add_option("--beta-clip", f.beta_clip, "Clip range MIN,MAX (default 0,10*alpha)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--boundary-convention", f.boundary,
                  "Pair count at the budget boundary: eq6 = (k-1), eq7 = (k-1)/2")
      ->check(CLI::IsMember({"eq6", "eq7"}))
      ->capture_default_str();
  cmd->add_flag("--raw-sim", f.raw_sim, "Use signed cosine similarity instead of max(0, .)");
  cmd->add_option("--stability-epsilon", f.stability_epsilon,
                  "Constant added to the calibration denominator")
      ->capture_default_str();
  cmd->add_option("--redundancy-scale", f.redundancy_scale,
                  "Multiplier applied to the resolved beta")
      ->capture_default_str();
}

SelectionConfig to_config(const SelectionFlags& f, std::uint64_t seed) {
  SelectionConfig cfg;
  cfg.weights.alpha = f.alpha;
  cfg.token_budget = f.budget;
  cfg.top_n = f.top_n;
  cfg.lambda = f.lambda;
  cfg.beta_zero = f.beta_zero;
  cfg.seed = seed;
  cfg.stability_epsilon = f.stability_epsilon;
  cfg.redundancy_scale = f.redundancy_scale;
  cfg.boundary = f.boundary == "eq6" ? BoundaryConvention::kFullPairCount
                                     : BoundaryConvention::kHalfPairCount;
  cfg.similarity = f.raw_sim ? SimilarityMode::kRaw : SimilarityMode::kClamped;
  if (!f.beta_clip.empty()) cfg.beta_clip = BetaClip{f.beta_clip[0], f.beta_clip[1]};

  BetaPolicy policy = BetaPolicy::kAdaptive;
  if (f.beta_policy) policy = *parse_beta_policy(*f.beta_policy);
  else if (f.beta) policy = BetaPolicy::kFixed;
  if (policy != BetaPolicy::kFixed && f.beta) {
    throw Error("--beta conflicts with --beta-policy " + *f.beta_policy);
  }
  if (policy == BetaPolicy::kFixed && !f.beta) {
    throw Error("--beta-policy fixed requires --beta");
  }
  cfg.beta_policy = policy;
  cfg.weights.beta = f.beta.value_or(0.0);
  cfg.validate();
  return cfg;
}

json stats_json(const PoolStats& s) {
  return {{"mean_token_length", s.mean_token_length},
          {"expected_set_size", s.expected_set_size},
          {"mean_query_sim", s.mean_query_sim},
          {"mean_pairwise_sim", s.mean_pairwise_sim},
          {"pairwise_estimation", std::string(to_string(s.pairwise_estimation))},
          {"pairs_used", s.pairs_used},
          {"view_size", s.view_size}};
}

json calibration_json(const BetaCalibration& c) {
  return {{"beta_star", c.beta_star},
          {"lambda", c.lambda},
          {"beta_zero", c.beta_zero},
          {"beta_final", c.beta_final},
          {"clipped", c.clipped}};
}

json selection_json(const Query& q, const SelectionResult& r,
                    const SelectionConfig& cfg, const ResolvedBeta& resolved) {
  json selected = json::array();
  for (const auto& s : r.selected) {
    selected.push_back({{"id", s.id}, {"marginal_gain", s.marginal_gain}});
  }
  json out = {{"query_id", q.id},
              {"selected", std::move(selected)},
              {"total_tokens", r.total_tokens},
              {"token_budget", r.token_budget},
              {"objective_value", r.objective_value},
              {"alpha", cfg.weights.alpha},
              {"beta_used", r.beta_used},
              {"beta_policy", std::string(to_string(cfg.beta_policy))},
              {"stop_reason", std::string(to_string(r.stop_reason))}};
  if (resolved.stats) out["pool_stats"] = stats_json(*resolved.stats);
  if (resolved.calibration) out["calibration"] = calibration_json(*resolved.calibration);
  return out;
}

json report_json(const Query& q, const AnalysisReport& r) {
  return {{"query_id", q.id},
          {"beta", r.beta},
          {"similarity", r.similarity == SimilarityMode::kRaw ? "raw" : "clamped"},
          {"opt_value", r.opt_value},
          {"opt_subset", r.opt_subset},
          {"greedy_value", r.greedy_value},
          {"greedy_subset", r.greedy_subset},
          {"epsilon_empirical", r.epsilon_empirical},
          {"epsilon_bound", r.epsilon_bound},
          {"delta_max", r.delta_max},
          {"k_max", r.k_max},
          {"guarantee_rhs", r.guarantee_rhs},
          {"guarantee_satisfied", r.guarantee_satisfied}};
}

int cmd_select(const Paths& p, const SelectionFlags& f, std::uint64_t seed,
               std::ostream& out, std::ostream& err) {
  const SelectionConfig cfg = to_config(f, seed);
  const CandidatePool pool = io::read_chunks(fs::path(p.chunks), &err);
  const std::vector<Query> queries = io::read_queries(fs::path(p.queries));
  if (queries.empty()) err << "warning: " << p.queries << " holds no queries\n";
  for (const Query& q : queries) {
    const ResolvedBeta resolved = resolve_beta(q, pool, cfg);
    const SelectionResult result = greedy_select(q, pool, cfg, resolved.beta);
    out << selection_json(q, result, cfg, resolved).dump() << '\n';
  }
  return kExitOk;
}

int cmd_calibrate(const Paths& p, const SelectionFlags& f, std::uint64_t seed,
                  std::ostream& out, std::ostream& err) {
  SelectionConfig cfg = to_config(f, seed);
  const CandidatePool pool = io::read_chunks(fs::path(p.chunks), &err);
  const std::vector<Query> queries = io::read_queries(fs::path(p.queries));
  if (queries.empty()) err << "warning: " << p.queries << " holds no queries\n";
  const PoolStatsOptions options{cfg.exact_pair_limit, cfg.sampled_pairs,
                                 cfg.similarity};
  for (const Query& q : queries) {
    const PoolStats stats =
        pool_stats(q, pool, cfg.top_n, cfg.token_budget, cfg.seed, options);
    const BetaCalibration cal = calibrate(stats, cfg, cfg.lambda, cfg.beta_zero);
    json record = {{"query_id", q.id},
                   {"pool_stats", stats_json(stats)},
                   {"calibration", calibration_json(cal)}};
    out << record.dump() << '\n';
  }
  return kExitOk;
}

std::vector<EvalRecord> evaluate_records(const Paths& p, const SelectionConfig& cfg,
                                         const std::vector<double>& grid,
                                         std::ostream& err) {
  const CandidatePool pool = io::read_chunks(fs::path(p.chunks), &err);
  const std::vector<Query> queries = io::read_queries(fs::path(p.queries));
  const std::vector<GoldReference> gold = io::read_gold(fs::path(p.gold));
  if (queries.empty()) err << "warning: " << p.queries << " holds no queries\n";

  std::map<std::string, const GoldReference*> gold_by_query;
  for (const auto& g : gold) gold_by_query[g.query_id] = &g;

  std::vector<EvalCase> cases;
  cases.reserve(queries.size());
  for (const Query& q : queries) {
    auto it = gold_by_query.find(q.id);
    cases.push_back(EvalCase{q, &pool, it == gold_by_query.end() ? nullptr : it->second});
  }
  if (grid.empty()) return run_comparison(cases, cfg);
  return run_beta_sweep(cases, cfg, grid);
}

int cmd_evaluate(const Paths& p, const SelectionFlags& f,
                 const std::vector<double>& grid, std::uint64_t seed,
                 std::ostream& out, std::ostream& err) {
  SelectionFlags flags = f;
  // A grid replaces the policy; each entry is run as a fixed beta.
  if (!grid.empty()) {
    if (f.beta || (f.beta_policy && *f.beta_policy != "fixed")) {
      throw Error("--beta-grid conflicts with --beta and adaptive policies");
    }
    flags.beta_policy.reset();
    flags.beta = grid.front();
  }
  const SelectionConfig cfg = to_config(flags, seed);
  const std::vector<EvalRecord> records = evaluate_records(p, cfg, grid, err);
  for (const EvalRecord& r : records) {
    if (r.status == RecordStatus::kError) {
      err << "warning: query '" << r.query_id << "': " << r.message << '\n';
    }
  }
  const ReportSummary summary = write_report(records, fs::path(p.out));

  json rows = json::array();
  for (const AggregateRow& row : summary.rows) {
    rows.push_back({{"setting", row.setting},
                    {"method", std::string(to_string(row.method))},
                    {"n", row.count},
                    {"mean_iou", row.mean_iou},
                    {"mean_redundancy_sum", row.mean_redundancy_sum},
                    {"mean_relevance_sum", row.mean_relevance_sum},
                    {"mean_total_tokens", row.mean_total_tokens}});
  }
  json result = {{"report", p.out},
                 {"summary", summary_path_for(fs::path(p.out)).string()},
                 {"records_written", summary.records_written},
                 {"records_failed", summary.records_failed},
                 {"aggregates", std::move(rows)}};
  out << result.dump() << '\n';
  return kExitOk;
}

int cmd_analyze(const Paths& p, const SelectionFlags& f, std::size_t trials,
                std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const SelectionConfig cfg = to_config(f, seed);
  const CandidatePool pool = io::read_chunks(fs::path(p.chunks), &err);
  if (pool.size() > kMaxExactPoolSize) {
    throw Error("analyze enumerates every subset and accepts at most " +
                std::to_string(kMaxExactPoolSize) + " chunks (got " +
                std::to_string(pool.size()) +
                "); try `adagres synth --n-chunks 12 --clusters 3`");
  }
  const std::vector<Query> queries = io::read_queries(fs::path(p.queries));
  if (queries.empty()) err << "warning: " << p.queries << " holds no queries\n";

  int status = kExitOk;
  for (const Query& q : queries) {
    const ResolvedBeta resolved = resolve_beta(q, pool, cfg);
    GuaranteeOptions options;
    options.gap_trials = trials;
    options.seed = seed;
    options.similarity = cfg.similarity;
    const AnalysisReport report = check_greedy_guarantee(
        q, pool, ScoreWeights{cfg.weights.alpha, resolved.beta}, cfg.token_budget,
        options);
    out << report_json(q, report).dump() << '\n';
    if (!report.guarantee_satisfied) {
      if (cfg.similarity == SimilarityMode::kClamped) {
        err << "error: query '" << q.id
            << "': greedy value falls below the guarantee bound\n";
        status = kExitGuaranteeViolated;
      } else {
        err << "note: query '" << q.id
            << "': guarantee not met under signed similarity\n";
      }
    }
  }
  return status;
}


int cmd_synth(const Paths& p, SyntheticPoolSpec spec, std::uint64_t seed,
              std::ostream& out) {
  spec.seed = seed;
  const SyntheticCorpus corpus = generate_synthetic(spec);

  const fs::path dir = p.out.empty() ? fs::path(".") : fs::path(p.out);
  const fs::path chunks = p.chunks.empty() ? dir / "chunks.jsonl" : fs::path(p.chunks);
  const fs::path queries = p.queries.empty() ? dir / "queries.jsonl" : fs::path(p.queries);
  const fs::path gold = p.gold.empty() ? dir / "gold.jsonl" : fs::path(p.gold);
  if (!p.out.empty()) fs::create_directories(dir);

  auto write = [](const fs::path& path, auto&& emit) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write '" + path.string() + "'");
    emit(file);
    if (!file.flush()) throw Error("failed writing '" + path.string() + "'");
  };
  write(chunks, [&](std::ostream& s) { io::write_chunks(corpus.pool, s); });
  write(queries, [&](std::ostream& s) {
    io::write_queries(std::span<const Query>(&corpus.query, 1), s);
  });
  write(gold, [&](std::ostream& s) {
    io::write_gold(std::span<const GoldReference>(&corpus.gold, 1), s);
  });

  json result = {{"chunks", chunks.string()},
                 {"queries", queries.string()},
                 {"gold", gold.string()},
                 {"n_chunks", corpus.pool.size()},
                 {"gold_ids", corpus.gold.gold_chunk_ids},
                 {"seed", seed}};
  if (corpus.realized_intra_cluster_sim == corpus.realized_intra_cluster_sim) {
    result["realized_intra_cluster_sim"] = corpus.realized_intra_cluster_sim;
  }
  out << result.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Redundancy-aware, token-budgeted context selection", "adagres"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  SelectionFlags flags;
  Paths paths;
  std::vector<double> grid;
  std::size_t trials = 20000;
  SyntheticPoolSpec spec;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for every random choice")
        ->envname("ADAGRES_SEED")
        ->capture_default_str();
  };

  CLI::App* select_cmd = app.add_subcommand("select", "Greedy context selection");
  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "Pool statistics and adaptive beta");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Compare against same-k top-k and write a CSV report");
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Check greedy against the exhaustive optimum");
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a clustered synthetic corpus");

  for (CLI::App* cmd : {select_cmd, calibrate_cmd, evaluate_cmd, analyze_cmd}) {
    add_selection_flags(cmd, flags);
    add_seed(cmd);
    cmd->add_option("--chunks", paths.chunks, "Chunk file (JSON lines)")->required();
    cmd->add_option("--queries", paths.queries, "Query file (JSON lines)")->required();
  }
  evaluate_cmd->add_option("--gold", paths.gold, "Gold file (JSON lines)")->required();
  evaluate_cmd->add_option("--out", paths.out, "Report CSV path")->required();
  evaluate_cmd->add_option("--beta-grid", grid, "Comma-separated fixed betas to sweep")
      ->delimiter(',');
  analyze_cmd->add_option("--trials", trials, "Sampled triples for pools above 10 chunks")
      ->capture_default_str();

  add_seed(synth_cmd);
  synth_cmd->add_option("--out", paths.out, "Output directory");
  synth_cmd->add_option("--chunks", paths.chunks, "Chunk file path (default OUT/chunks.jsonl)");
  synth_cmd->add_option("--queries", paths.queries, "Query file path (default OUT/queries.jsonl)");
  synth_cmd->add_option("--gold", paths.gold, "Gold file path (default OUT/gold.jsonl)");
  synth_cmd->add_option("--n-chunks", spec.n_chunks)->capture_default_str();
  synth_cmd->add_option("--dim", spec.dimension)->capture_default_str();
  synth_cmd->add_option("--clusters", spec.n_clusters)->capture_default_str();
  synth_cmd->add_option("--relevant-clusters", spec.n_relevant_clusters,
                        "0 means ceil(clusters / 2)")
      ->capture_default_str();
  synth_cmd->add_option("--target-sim", spec.intra_cluster_sim_target)->capture_default_str();
  synth_cmd->add_option("--min-tokens", spec.token_min)->capture_default_str();
  synth_cmd->add_option("--max-tokens", spec.token_max)->capture_default_str();
  synth_cmd->add_option("--relevance-decay", spec.relevance_decay)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*select_cmd) return cmd_select(paths, flags, seed, out, err);
    if (*calibrate_cmd) return cmd_calibrate(paths, flags, seed, out, err);
    if (*evaluate_cmd) return cmd_evaluate(paths, flags, grid, seed, out, err);
    if (*analyze_cmd) return cmd_analyze(paths, flags, trials, seed, out, err);
    if (*synth_cmd) return cmd_synth(paths, spec, seed, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("adagres");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace adagres::cli
