#include "sqlconf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "sqlconf/errors.hpp"
#include "sqlconf/hashing.hpp"
#include "sqlconf/pipeline.hpp"

namespace sqlconf::eval {

using nlohmann::json;

double compute_auroc(const std::vector<double>& scores,
                     const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw ContractError("compute_auroc: scores/labels size mismatch");
  }
  long long positives = 0, negatives = 0;
  for (bool l : labels) (l ? positives : negatives)++;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError(
        "AUROC undefined: labels are all-positive or all-negative");
  }

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Tie-group counting of (positive > negative) pairs, half credit for ties.
  long long wins = 0, ties = 0, negatives_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    long long pos_group = 0, neg_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos_group : neg_group)++;
      ++j;
    }
    wins += pos_group * negatives_below;
    ties += pos_group * neg_group;
    negatives_below += neg_group;
    i = j;
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         (static_cast<double>(positives) * static_cast<double>(negatives));
}

double EvalRun::accuracy() const {
  if (records.empty()) return 0.0;
  long correct = 0;
  for (const auto& r : records) correct += r.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::vector<double> EvalRun::scores_for(const std::string& key) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = r.scores.find(key);
    if (it == r.scores.end()) {
      throw ContractError("run has no score for strategy " + key);
    }
    out.push_back(it->second.score);
  }
  return out;
}

std::vector<bool> EvalRun::labels() const {
  std::vector<bool> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

ConfusionMatrix build_confusion_matrix(const EvalRun& run,
                                       const std::string& strategy_key) {
  ConfusionMatrix m;
  for (const auto& r : run.records) {
    auto it = r.scores.find(strategy_key);
    if (it == r.scores.end()) {
      throw ContractError("run has no score for strategy " + strategy_key);
    }
    if (!it->second.verdict) {
      throw ContractError("strategy " + strategy_key +
                          " produced no binary verdicts");
    }
    bool confident = *it->second.verdict;
    if (r.label) {
      (confident ? m.accurate_confident : m.accurate_nonconfident)++;
    } else {
      (confident ? m.nonaccurate_confident : m.nonaccurate_nonconfident)++;
    }
  }
  return m;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  return grid;
}

std::vector<SweepRow> threshold_sweep(const EvalRun& run,
                                      const std::string& strategy_key,
                                      const std::vector<double>& grid) {
  if (run.records.empty()) {
    throw ContractError("threshold_sweep: empty run");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0 || (i > 0 && grid[i] < grid[i - 1])) {
      throw ContractError("threshold_sweep: grid must be ascending in [0,1]");
    }
  }
  auto scores = run.scores_for(strategy_key);
  auto labels = run.labels();
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    SweepRow row;
    row.threshold = t;
    long returned = 0, correct = 0;
    double conf_sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {  // "above a given threshold" read as >=
        ++returned;
        conf_sum += scores[i];
        if (labels[i]) ++correct;
      }
    }
    row.return_rate =
        static_cast<double>(returned) / static_cast<double>(scores.size());
    if (returned > 0) {
      row.accuracy = static_cast<double>(correct) / returned;
      row.mean_confidence = conf_sum / returned;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Evaluation driver
// ---------------------------------------------------------------------------

namespace {

std::string case_id_for(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "case-%05zu", index);
  return buf;
}

struct CaseOutcome {
  CaseResult result;
  bool excluded = false;
};

CaseOutcome evaluate_case(const bank::EvalCase& eval_case, std::size_t index,
                          const bank::QuestionBank& bank_ref,
                          const bank::EntityCatalog& catalog,
                          const embed::QuestionIndex& index_ref,
                          llm::LlmBackend& backend,
                          const std::vector<std::string>& strategies,
                          const oracle::FixtureDb& db) {
  CaseOutcome out;
  CaseResult& r = out.result;
  r.case_id = case_id_for(index);
  r.source_entry_id = eval_case.source_entry_id;
  if (const auto* entry = bank_ref.find(eval_case.source_entry_id)) {
    r.complexity = entry->complexity;
  }
  auto record = pipeline::generate_sql(eval_case, r.case_id, index_ref,
                                       bank_ref, catalog, backend, db);
  r.label = record.correct.value;
  r.generated_sql = record.generated_sql;

  try {
    for (const auto& key : strategies) {
      if (key == "embedding") {
        r.scores[key] = confidence::score_embedding_similarity(
            index_ref, eval_case.question);
      } else if (key == "translation") {
        if (record.generated_sql.empty()) {
          confidence::ConfidenceScore s;
          s.strategy = confidence::Strategy::kTranslation;
          s.score = 0.0;
          s.verdict = false;
          s.rationale = "no SQL generated";
          r.scores[key] = s;
        } else {
          r.scores[key] = confidence::score_translation_consistency(
              backend, record, eval_case.question);
        }
      } else if (key.rfind("self_report", 0) == 0) {
        std::string variant = "straight";
        auto colon = key.find(':');
        if (colon != std::string::npos) variant = key.substr(colon + 1);
        if (record.generated_sql.empty()) {
          confidence::ConfidenceScore s;
          s.strategy = confidence::Strategy::kSelfReport;
          s.variant = variant;
          s.score = 0.0;
          if (variant == "binary") s.verdict = false;
          s.rationale = "no SQL generated";
          r.scores[key] = s;
        } else {
          r.scores[key] = confidence::score_self_report(
              backend, record, confidence::prompt_strategy(variant));
        }
      } else {
        throw ContractError("unknown strategy key: " + key);
      }
    }
  } catch (const ScoringError&) {
    out.excluded = true;
  }
  return out;
}

}  // namespace

EvalRun run_evaluation(const bank::QuestionBank& bank_ref,
                       const bank::EvalSet& eval_set, llm::LlmBackend& backend,
                       const std::vector<std::string>& strategies,
                       std::uint64_t seed, const std::string& db_path,
                       int workers) {
  if (workers < 1) throw ContractError("run_evaluation: workers must be >= 1");
  auto index = embed::QuestionIndex::build(bank_ref.id_questions());
  auto catalog_db = oracle::FixtureDb::open(db_path);
  auto catalog = bank::load_catalog(catalog_db);

  std::vector<CaseOutcome> outcomes(eval_set.cases.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    // Independent read-only handle per worker.
    auto db = oracle::FixtureDb::open(db_path);
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= eval_set.cases.size()) break;
      outcomes[i] = evaluate_case(eval_set.cases[i], i, bank_ref, catalog,
                                  index, backend, strategies, db);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  EvalRun run;
  run.metadata.run_id = "run-" + std::to_string(seed);
  run.metadata.backend = backend.name();
  run.metadata.seed = seed;
  run.metadata.strategies = strategies;
  for (auto& outcome : outcomes) {
    if (outcome.excluded) {
      run.metadata.excluded++;
    } else {
      run.records.push_back(std::move(outcome.result));
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Persistence and reporting
// ---------------------------------------------------------------------------

namespace {

json score_to_json(const confidence::ConfidenceScore& s) {
  json j = {{"strategy", confidence::to_string(s.strategy)},
            {"variant", s.variant},
            {"score", s.score},
            {"rationale", s.rationale}};
  j["verdict"] = s.verdict ? json(*s.verdict) : json(nullptr);
  return j;
}

confidence::ConfidenceScore score_from_json(const json& j) {
  confidence::ConfidenceScore s;
  s.strategy = confidence::strategy_from_string(j.at("strategy"));
  s.variant = j.at("variant").get<std::string>();
  s.score = j.at("score").get<double>();
  if (!j.at("verdict").is_null()) s.verdict = j.at("verdict").get<bool>();
  s.rationale = j.at("rationale").get<std::string>();
  return s;
}

}  // namespace

void save_run(const EvalRun& run, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  json meta = {{"type", "metadata"},
               {"run_id", run.metadata.run_id},
               {"backend", run.metadata.backend},
               {"seed", run.metadata.seed},
               {"strategies", run.metadata.strategies},
               {"excluded", run.metadata.excluded}};
  out << meta.dump() << "\n";
  for (const auto& r : run.records) {
    json scores = json::object();
    for (const auto& [key, score] : r.scores) {
      scores[key] = score_to_json(score);
    }
    json j = {{"case_id", r.case_id},
              {"source_entry_id", r.source_entry_id},
              {"complexity", bank::to_string(r.complexity)},
              {"label", r.label},
              {"generated_sql", r.generated_sql},
              {"scores", scores}};
    out << j.dump() << "\n";
  }
}

EvalRun load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  EvalRun run;
  std::string line;
  long line_no = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed run record: ") + e.what(),
                       line_no);
    }
    if (!have_meta) {
      run.metadata.run_id = j.at("run_id").get<std::string>();
      run.metadata.backend = j.at("backend").get<std::string>();
      run.metadata.seed = j.at("seed").get<std::uint64_t>();
      run.metadata.strategies =
          j.at("strategies").get<std::vector<std::string>>();
      run.metadata.excluded = j.at("excluded").get<int>();
      have_meta = true;
      continue;
    }
    CaseResult r;
    r.case_id = j.at("case_id").get<std::string>();
    r.source_entry_id = j.at("source_entry_id").get<std::string>();
    r.complexity = bank::complexity_from_string(j.at("complexity"));
    r.label = j.at("label").get<bool>();
    r.generated_sql = j.at("generated_sql").get<std::string>();
    for (const auto& [key, value] : j.at("scores").items()) {
      r.scores[key] = score_from_json(value);
    }
    run.records.push_back(std::move(r));
  }
  return run;
}

namespace {

json auroc_or_null(const std::vector<double>& scores,
                   const std::vector<bool>& labels) {
  try {
    return compute_auroc(scores, labels);
  } catch (const UndefinedMetricError&) {
    return nullptr;
  }
}

}  // namespace

json build_report(const EvalRun& run) {
  json strategies = json::object();
  for (const auto& key : run.metadata.strategies) {
    auto scores = run.scores_for(key);
    auto labels = run.labels();
    json entry;
    entry["auroc"] = auroc_or_null(scores, labels);

    for (auto stratum : {bank::Complexity::kSimple, bank::Complexity::kComplex}) {
      std::vector<double> s;
      std::vector<bool> l;
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        if (run.records[i].complexity == stratum) {
          s.push_back(scores[i]);
          l.push_back(labels[i]);
        }
      }
      json value = s.empty() ? json(nullptr) : auroc_or_null(s, l);
      entry["auroc_" + bank::to_string(stratum)] = value;
    }

    bool has_verdicts = !run.records.empty();
    for (const auto& r : run.records) {
      auto it = r.scores.find(key);
      if (it == r.scores.end() || !it->second.verdict) {
        has_verdicts = false;
        break;
      }
    }
    if (has_verdicts) {
      auto m = build_confusion_matrix(run, key);
      entry["confusion_matrix"] = {
          {"accurate_confident", m.accurate_confident},
          {"accurate_nonconfident", m.accurate_nonconfident},
          {"nonaccurate_confident", m.nonaccurate_confident},
          {"nonaccurate_nonconfident", m.nonaccurate_nonconfident}};
    }

    if (!run.records.empty()) {
      json sweep = json::array();
      for (const auto& row : threshold_sweep(run, key, default_grid())) {
        sweep.push_back(
            {{"threshold", row.threshold},
             {"return_rate", row.return_rate},
             {"accuracy", row.accuracy ? json(*row.accuracy) : json(nullptr)},
             {"mean_confidence",
              row.mean_confidence ? json(*row.mean_confidence) : json(nullptr)}});
      }
      entry["sweep"] = sweep;
    }
    strategies[key] = entry;
  }

  return {{"header",
           {{"return_rate_convention", "returned iff score >= threshold"},
            {"tie_convention", "equal-score positive/negative pairs credit 0.5"}}},
          {"metadata",
           {{"run_id", run.metadata.run_id},
            {"backend", run.metadata.backend},
            {"seed", run.metadata.seed},
            {"strategies", run.metadata.strategies},
            {"excluded", run.metadata.excluded},
            {"record_count", run.records.size()}}},
          {"accuracy", run.accuracy()},
          {"strategies", strategies}};
}

void emit_report(const EvalRun& run, const std::string& out_dir,
                 const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory: " + out_dir);

  bool want_json = format == "json" || format == "all";
  bool want_csv = format == "csv" || format == "all";
  if (!want_json && !want_csv) {
    throw ContractError("emit_report: format must be json, csv, or all");
  }

  if (want_json) {
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw Error("cannot write report.json in " + out_dir);
    out << build_report(run).dump(2) << "\n";
  }
  if (want_csv && !run.records.empty()) {
    for (const auto& key : run.metadata.strategies) {
      std::string name = key;
      std::replace(name.begin(), name.end(), ':', '_');
      std::ofstream out(out_dir + "/sweep_" + name + ".csv");
      if (!out) throw Error("cannot write sweep CSV in " + out_dir);
      out << "threshold,return_rate,accuracy,mean_confidence\n";
      for (const auto& row : threshold_sweep(run, key, default_grid())) {
        out << row.threshold << "," << row.return_rate << ",";
        if (row.accuracy) out << *row.accuracy;
        out << ",";
        if (row.mean_confidence) out << *row.mean_confidence;
        out << "\n";
      }
    }
  }
}

}  // namespace sqlconf::eval
