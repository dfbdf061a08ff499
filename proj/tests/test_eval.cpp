#include <doctest.h>

#include <cmath>
#include <random>

#include "sqlconf/errors.hpp"
#include "sqlconf/eval.hpp"
#include "test_util.hpp"

using namespace sqlconf;
using eval::compute_auroc;

namespace {

double brute_force_auroc(const std::vector<double>& scores,
                         const std::vector<bool>& labels) {
  double wins = 0.0;
  long long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// A run with one strategy key "s"; verdict attached when scores are 0/1.
eval::EvalRun make_run(const std::vector<std::pair<double, bool>>& data,
                       bool with_verdicts = false) {
  eval::EvalRun run;
  run.metadata.run_id = "t";
  run.metadata.backend = "scripted";
  run.metadata.strategies = {"s"};
  for (std::size_t i = 0; i < data.size(); ++i) {
    eval::CaseResult r;
    r.case_id = "case-" + std::to_string(i);
    r.source_entry_id = "e";
    r.label = data[i].second;
    confidence::ConfidenceScore score;
    score.score = data[i].first;
    if (with_verdicts) score.verdict = data[i].first >= 0.5;
    r.scores["s"] = score;
    run.records.push_back(std::move(r));
  }
  return run;
}

}  // namespace

TEST_CASE("compute_auroc: separations and ties") {
  CHECK(compute_auroc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}) == 1.0);
  CHECK(compute_auroc({0.1, 0.2, 0.8, 0.9}, {true, true, false, false}) == 0.0);
  CHECK(compute_auroc({0.5, 0.5, 0.5, 0.5}, {true, true, false, false}) == 0.5);
  CHECK(compute_auroc({0.7, 0.5, 0.5, 0.2}, {true, false, true, false}) ==
        doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("compute_auroc: binary confident/not-confident cross-tab value") {
  // 754 accurate-confident, 12 accurate-nonconfident,
  // 208 nonaccurate-confident, 14 nonaccurate-nonconfident.
  // Exact value: (754*14 + 0.5*(754*208 + 12*14)) / (766*222) = 0.523757...
  std::vector<double> scores;
  std::vector<bool> labels;
  auto add = [&](int n, double s, bool l) {
    for (int i = 0; i < n; ++i) {
      scores.push_back(s);
      labels.push_back(l);
    }
  };
  add(754, 1.0, true);
  add(12, 0.0, true);
  add(208, 1.0, false);
  add(14, 0.0, false);
  double auroc = compute_auroc(scores, labels);
  CHECK(std::fabs(auroc - (10556.0 + 0.5 * 157000.0) / 170052.0) < 1e-15);
  CHECK(std::fabs(auroc - 0.524) < 1e-3);
}

TEST_CASE("compute_auroc equals the brute-force pairwise count") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores;
    std::vector<bool> labels;
    int n = 5 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      // Coarse grid to force plenty of ties.
      scores.push_back(static_cast<double>(rng() % 5) / 4.0);
      labels.push_back(rng() % 2 == 0);
    }
    bool pos = false, neg = false;
    for (bool l : labels) (l ? pos : neg) = true;
    if (!pos || !neg) continue;
    CHECK(compute_auroc(scores, labels) ==
          doctest::Approx(brute_force_auroc(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("compute_auroc: label flip and monotone-transform identities") {
  std::vector<double> scores = {0.9, 0.3, 0.3, 0.7, 0.1, 0.6};
  std::vector<bool> labels = {true, false, true, true, false, false};
  double a = compute_auroc(scores, labels);

  std::vector<bool> flipped;
  for (bool l : labels) flipped.push_back(!l);
  CHECK(compute_auroc(scores, flipped) == doctest::Approx(1.0 - a));

  std::vector<double> squashed;
  for (double s : scores) squashed.push_back(s * s * 0.5 + 0.1);
  CHECK(compute_auroc(squashed, labels) == doctest::Approx(a));
}

TEST_CASE("compute_auroc: degenerate labels are undefined") {
  CHECK_THROWS_AS(compute_auroc({0.1, 0.9}, {true, true}),
                  UndefinedMetricError);
  CHECK_THROWS_AS(compute_auroc({0.1, 0.9}, {false, false}),
                  UndefinedMetricError);
  CHECK_THROWS_AS(compute_auroc({0.1}, {true, false}), ContractError);
}

TEST_CASE("confusion matrix cross-tabulates verdicts against labels") {
  std::vector<std::pair<double, bool>> data;
  auto add = [&](int n, double s, bool l) {
    for (int i = 0; i < n; ++i) data.emplace_back(s, l);
  };
  add(754, 1.0, true);
  add(12, 0.0, true);
  add(208, 1.0, false);
  add(14, 0.0, false);
  auto run = make_run(data, /*with_verdicts=*/true);

  auto m = eval::build_confusion_matrix(run, "s");
  CHECK(m.accurate_confident == 754);
  CHECK(m.accurate_nonconfident == 12);
  CHECK(m.nonaccurate_confident == 208);
  CHECK(m.nonaccurate_nonconfident == 14);
  CHECK(m.total() == 988);
  CHECK(run.accuracy() == doctest::Approx(766.0 / 988.0).epsilon(1e-12));

  auto no_verdicts = make_run(data, /*with_verdicts=*/false);
  CHECK_THROWS_AS(eval::build_confusion_matrix(no_verdicts, "s"),
                  ContractError);
}

TEST_CASE("threshold sweep: four-record worked example") {
  auto run = make_run({{0.9, true}, {0.7, false}, {0.5, true}, {0.2, false}});
  auto rows = eval::threshold_sweep(run, "s", {0.0, 0.5, 0.6, 1.0});
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].return_rate == 1.0);
  CHECK(*rows[0].accuracy == doctest::Approx(0.5));
  CHECK(*rows[0].mean_confidence == doctest::Approx(0.575));

  // >= convention: 0.5 itself is returned.
  CHECK(rows[1].return_rate == doctest::Approx(0.75));
  CHECK(*rows[1].accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(*rows[1].mean_confidence == doctest::Approx(0.7));

  CHECK(rows[2].return_rate == doctest::Approx(0.5));
  CHECK(*rows[2].accuracy == doctest::Approx(0.5));

  CHECK(rows[3].return_rate == 0.0);
  CHECK_FALSE(rows[3].accuracy.has_value());
  CHECK_FALSE(rows[3].mean_confidence.has_value());
}

TEST_CASE("threshold sweep: grid and run validation") {
  auto run = make_run({{0.5, true}, {0.4, false}});
  CHECK_THROWS_AS(eval::threshold_sweep(run, "s", {0.5, 0.4}), ContractError);
  CHECK_THROWS_AS(eval::threshold_sweep(run, "s", {-0.1}), ContractError);
  CHECK_THROWS_AS(eval::threshold_sweep(run, "s", {1.1}), ContractError);
  CHECK_THROWS_AS(eval::threshold_sweep({}, "s", {0.5}), ContractError);
  CHECK(eval::default_grid().size() == 21);
  CHECK(eval::default_grid().front() == 0.0);
  CHECK(eval::default_grid().back() == doctest::Approx(1.0));
}

TEST_CASE("run files round-trip byte-identically") {
  test::TempDir tmp;
  auto run = make_run({{0.9, true}, {0.2, false}}, /*with_verdicts=*/true);
  run.metadata.seed = 17;
  run.records[0].generated_sql = "SELECT 1";
  eval::save_run(run, tmp.file("run.jsonl"));
  auto loaded = eval::load_run(tmp.file("run.jsonl"));
  eval::save_run(loaded, tmp.file("run2.jsonl"));
  CHECK(test::slurp(tmp.file("run.jsonl")) ==
        test::slurp(tmp.file("run2.jsonl")));
  CHECK(loaded.metadata.seed == 17);
  CHECK(loaded.records.size() == 2);
  REQUIRE(loaded.records[0].scores.at("s").verdict.has_value());
}

TEST_CASE("run_evaluation is independent of worker count") {
  test::TempDir tmp;
  auto db_path = tmp.file("f.db");
  auto db = test::make_fixture_db(db_path, 2);
  auto catalog = bank::load_catalog(db);
  auto question_bank = bank::generate_bank({30, 20, 10, 2}, db);
  auto paraphraser = bank::default_paraphraser(catalog);
  auto eval_set =
      bank::build_eval_set(question_bank, paraphraser, db, catalog, 2);
  REQUIRE_FALSE(eval_set.cases.empty());

  llm::SimulatorConfig cfg;
  cfg.seed = 2;
  llm::SimulatedBackend backend(cfg);
  std::vector<std::string> strategies = {"embedding", "self_report:straight",
                                         "translation"};

  auto one = eval::run_evaluation(question_bank, eval_set, backend, strategies,
                                  2, db_path, 1);
  auto four = eval::run_evaluation(question_bank, eval_set, backend, strategies,
                                   2, db_path, 4);
  eval::save_run(one, tmp.file("one.jsonl"));
  eval::save_run(four, tmp.file("four.jsonl"));
  CHECK(test::slurp(tmp.file("one.jsonl")) ==
        test::slurp(tmp.file("four.jsonl")));
  CHECK(one.records.size() + one.metadata.excluded == eval_set.cases.size());
  for (const auto& r : one.records) {
    CHECK(r.scores.size() == 3);
    for (const auto& [key, score] : r.scores) {
      CHECK(score.score >= 0.0);
      CHECK(score.score <= 1.0);
    }
  }
}

TEST_CASE("build_report and emit_report cover every requested strategy") {
  test::TempDir tmp;
  auto run = make_run({{0.9, true}, {0.8, true}, {0.3, false}, {0.6, false}},
                      /*with_verdicts=*/true);
  auto report = eval::build_report(run);
  REQUIRE(report.contains("strategies"));
  const auto& s = report["strategies"]["s"];
  CHECK(s["auroc"].get<double>() ==
        doctest::Approx(compute_auroc({0.9, 0.8, 0.3, 0.6},
                                      {true, true, false, false})));
  CHECK(s.contains("confusion_matrix"));
  CHECK(s["sweep"].size() == 21);
  CHECK(report["accuracy"].get<double>() == doctest::Approx(0.5));

  eval::emit_report(run, tmp.file("out"), "all");
  CHECK(test::slurp(tmp.file("out") + "/report.json").find("auroc") !=
        std::string::npos);
  auto csv = test::slurp(tmp.file("out") + "/sweep_s.csv");
  CHECK(csv.rfind("threshold,return_rate,accuracy,mean_confidence\n", 0) == 0);
  CHECK_THROWS_AS(eval::emit_report(run, tmp.file("out"), "yaml"),
                  ContractError);
}
