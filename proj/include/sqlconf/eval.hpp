#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlconf/bank.hpp"
#include "sqlconf/confidence.hpp"
#include "sqlconf/llm.hpp"

namespace sqlconf::eval {

// Pairwise AUROC with 0.5 credit for score ties. Implemented by tie-group
// counting; equals the brute-force double loop exactly.
// Throws UndefinedMetricError when labels are all-positive or all-negative.
double compute_auroc(const std::vector<double>& scores,
                     const std::vector<bool>& labels);

struct ConfusionMatrix {
  long accurate_confident = 0;
  long accurate_nonconfident = 0;
  long nonaccurate_confident = 0;
  long nonaccurate_nonconfident = 0;

  long total() const {
    return accurate_confident + accurate_nonconfident + nonaccurate_confident +
           nonaccurate_nonconfident;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct SweepRow {
  double threshold = 0.0;
  double return_rate = 0.0;                 // fraction with score >= threshold
  std::optional<double> accuracy;           // over returned; nullopt when none
  std::optional<double> mean_confidence;    // over returned; nullopt when none
};

struct CaseResult {
  std::string case_id;
  std::string source_entry_id;
  bank::Complexity complexity = bank::Complexity::kSimple;
  bool label = false;
  std::string generated_sql;
  // keyed by strategy key: "embedding", "translation", "self_report:<variant>"
  std::map<std::string, confidence::ConfidenceScore> scores;
};

struct RunMetadata {
  std::string run_id;
  std::string backend;
  std::uint64_t seed = 0;
  std::vector<std::string> strategies;
  int excluded = 0;
};

struct EvalRun {
  RunMetadata metadata;
  std::vector<CaseResult> records;

  double accuracy() const;  // fraction of true labels
  std::vector<double> scores_for(const std::string& strategy_key) const;
  std::vector<bool> labels() const;
};

// Cross-tabulates binary verdicts against correctness.
// Throws ContractError when the strategy lacks verdicts.
ConfusionMatrix build_confusion_matrix(const EvalRun& run,
                                       const std::string& strategy_key);

// Per threshold t: return_rate = |score >= t| / N, accuracy over the
// returned subset (nullopt when nothing returned). Grid must be sorted
// ascending within [0,1]. Throws ContractError on an empty run.
std::vector<SweepRow> threshold_sweep(const EvalRun& run,
                                      const std::string& strategy_key,
                                      const std::vector<double>& grid);

// 0.00 .. 1.00 step 0.05.
std::vector<double> default_grid();

// Generates SQL for every case, labels correctness, and applies each
// requested strategy. Deterministic for a fixed seed under the simulated
// backend, independent of worker count. Strategy keys as in CaseResult.
EvalRun run_evaluation(const bank::QuestionBank& bank,
                       const bank::EvalSet& eval_set, llm::LlmBackend& backend,
                       const std::vector<std::string>& strategies,
                       std::uint64_t seed, const std::string& db_path,
                       int workers = 1);

// Run file: one metadata header object, then one JSON record per line.
void save_run(const EvalRun& run, const std::string& path);
EvalRun load_run(const std::string& path);

// Writes report.json (per-strategy AUROC pooled and per complexity stratum,
// confusion matrices where verdicts exist) and one sweep CSV per strategy
// with columns threshold,return_rate,accuracy,mean_confidence.
// `format` is "json", "csv", or "all".
void emit_report(const EvalRun& run, const std::string& out_dir,
                 const std::string& format = "all");

// The report.json payload, exposed for tests and the CLI summary.
nlohmann::json build_report(const EvalRun& run);

}  // namespace sqlconf::eval
