#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sqlconf/bank.hpp"
#include "sqlconf/confidence.hpp"
#include "sqlconf/errors.hpp"
#include "sqlconf/eval.hpp"
#include "sqlconf/llm.hpp"
#include "sqlconf/pipeline.hpp"

namespace {

using nlohmann::json;
using namespace sqlconf;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAbstain = 3;

struct LlmOptions {
  std::string backend = "simulated";
  double corruption_steepness = 12.0;
  double corruption_midpoint = 0.85;
  double overconfidence_center = 0.93;
  double overconfidence_spread = 0.05;
};

void add_llm_options(CLI::App& cmd, LlmOptions& opts) {
  cmd.add_option("--llm.backend", opts.backend, "simulated or remote")
      ->check(CLI::IsMember({"simulated", "remote"}));
  cmd.add_option("--llm.corruption-steepness", opts.corruption_steepness);
  cmd.add_option("--llm.corruption-midpoint", opts.corruption_midpoint);
  cmd.add_option("--llm.overconfidence-center", opts.overconfidence_center);
  cmd.add_option("--llm.overconfidence-spread", opts.overconfidence_spread);
}

std::unique_ptr<llm::LlmBackend> make_backend(const LlmOptions& opts,
                                              std::uint64_t seed) {
  if (opts.backend == "remote") {
    return std::make_unique<llm::RemoteBackend>(llm::remote_config_from_env());
  }
  llm::SimulatorConfig cfg;
  cfg.seed = seed;
  cfg.corruption_steepness = opts.corruption_steepness;
  cfg.corruption_midpoint = opts.corruption_midpoint;
  cfg.overconfidence_center = opts.overconfidence_center;
  cfg.overconfidence_spread = opts.overconfidence_spread;
  return std::make_unique<llm::SimulatedBackend>(cfg);
}

std::vector<std::string> split_strategies(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bank_generate(const std::string& bank_path, const std::string& db_path,
                      int total, int simple, int complex_count,
                      std::uint64_t seed) {
  std::filesystem::remove(db_path);
  auto db = oracle::FixtureDb::open(db_path, /*read_write=*/true);
  bank::seed_fixture_database(db, seed);
  bank::BankConfig config{total, simple, complex_count, seed};
  auto generated = bank::generate_bank(config, db);
  bank::save_bank(generated, bank_path);
  std::cerr << "wrote " << generated.entries.size() << " entries to "
            << bank_path << " (db: " << db_path << ")\n";
  return kExitOk;
}

int cmd_bank_validate(const std::string& bank_path,
                      const std::string& db_path) {
  auto db = oracle::FixtureDb::open(db_path);
  auto loaded = bank::load_bank(bank_path);
  int failures = 0;
  for (const auto& entry : loaded.entries) {
    auto outcome = bank::validate_entry(entry, db);
    if (!outcome.pass) {
      ++failures;
      std::cerr << "FAIL " << entry.id << ": " << outcome.detail << "\n";
    }
  }
  std::cerr << loaded.entries.size() - failures << "/" << loaded.entries.size()
            << " entries valid\n";
  return failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_eval_build(const std::string& bank_path, const std::string& db_path,
                   const std::string& out_path, std::uint64_t seed,
                   int per_entry) {
  auto db = oracle::FixtureDb::open(db_path);
  auto loaded = bank::load_bank(bank_path);
  auto catalog = bank::load_catalog(db);
  auto paraphraser = bank::default_paraphraser(catalog);
  auto set = bank::build_eval_set(loaded, paraphraser, db, catalog, seed,
                                  per_entry);
  bank::save_eval_set(set, out_path);
  for (const auto& s : set.skipped) std::cerr << "skipped: " << s << "\n";
  std::cerr << "wrote " << set.cases.size() << " cases to " << out_path << "\n";
  return kExitOk;
}

int cmd_eval_run(const std::string& bank_path, const std::string& db_path,
                 const std::string& eval_set_path, const std::string& out_dir,
                 const std::string& strategies_list, std::uint64_t seed,
                 int workers, const LlmOptions& llm_opts) {
  if (!std::filesystem::exists(bank_path) ||
      !std::filesystem::exists(db_path) ||
      !std::filesystem::exists(eval_set_path)) {
    std::cerr << "missing input: bank, db, and eval set files are required\n";
    return kExitUsage;
  }
  auto loaded = bank::load_bank(bank_path);
  auto eval_set = bank::load_eval_set(eval_set_path);
  auto backend = make_backend(llm_opts, seed);
  auto strategies = split_strategies(strategies_list);
  auto run = eval::run_evaluation(loaded, eval_set, *backend, strategies, seed,
                                  db_path, workers);
  std::filesystem::create_directories(out_dir);
  eval::save_run(run, out_dir + "/run.jsonl");
  eval::emit_report(run, out_dir);

  json summary = json::object();
  for (const auto& key : strategies) {
    json value;
    try {
      value = eval::compute_auroc(run.scores_for(key), run.labels());
    } catch (const UndefinedMetricError&) {
      value = nullptr;
    }
    summary[key] = value;
    std::cerr << "AUROC " << key << ": "
              << (value.is_null() ? "n/a" : std::to_string(value.get<double>()))
              << "\n";
  }
  std::cout << json({{"accuracy", run.accuracy()}, {"auroc", summary}}).dump()
            << "\n";
  return kExitOk;
}

int cmd_gate(const std::string& question, const std::string& bank_path,
             const std::string& db_path, double threshold, std::uint64_t seed,
             const std::string& strategy, int k, const LlmOptions& llm_opts) {
  auto db = oracle::FixtureDb::open(db_path);
  auto loaded = bank::load_bank(bank_path);
  auto catalog = bank::load_catalog(db);
  auto index = embed::QuestionIndex::build(loaded.id_questions());
  auto backend = make_backend(llm_opts, seed);

  // For the simulated backend the nearest bank entry supplies the reference
  // SQL, with the question's entity substituted in.
  auto hits = index.top_k(question, 1);
  const auto* nearest = loaded.find(hits.front().entry_id);
  bank::EvalCase pseudo;
  pseudo.source_entry_id = nearest->id;
  pseudo.question = question;
  pseudo.ground_truth_sql = nearest->reference_sql;
  auto entities = pipeline::extract_entities(question, catalog);
  for (const auto& ce : nearest->context) {
    if (ce.table != "product" || ce.id.empty()) continue;
    for (const auto& e : entities) {
      if (e.table == "product" && !e.id.empty() && e.id != ce.id) {
        std::string& sql = pseudo.ground_truth_sql;
        std::string::size_type pos = 0;
        while ((pos = sql.find(ce.id, pos)) != std::string::npos) {
          sql.replace(pos, ce.id.size(), e.id);
          pos += e.id.size();
        }
        break;
      }
    }
    break;
  }

  auto record = pipeline::generate_sql(pseudo, "gate", index, loaded, catalog,
                                       *backend, db, k);

  double conf;
  if (strategy == "embedding") {
    conf = confidence::score_embedding_similarity(index, question, k).score;
  } else if (strategy == "translation") {
    conf = confidence::score_translation_consistency(*backend, record, question)
               .score;
  } else if (strategy.rfind("self_report", 0) == 0) {
    std::string variant = "straight";
    auto colon = strategy.find(':');
    if (colon != std::string::npos) variant = strategy.substr(colon + 1);
    conf = confidence::score_self_report(*backend, record,
                                         confidence::prompt_strategy(variant))
               .score;
  } else {
    std::cerr << "unknown strategy: " << strategy << "\n";
    return kExitUsage;
  }

  bool answer = conf >= threshold;
  json out = {{"sql", record.generated_sql},
              {"confidence", conf},
              {"decision", answer ? "answer" : "abstain"}};
  std::cout << out.dump() << "\n";
  std::cerr << (answer ? "answer" : "abstain") << " (confidence "
            << conf << ", threshold " << threshold << ")\n";
  return answer ? kExitOk : kExitAbstain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-SQL confidence scoring and gating"};
  app.require_subcommand(1);
  app.set_config("--config");

  std::string bank_path = "bank.jsonl";
  std::string db_path = "fixture.db";
  std::uint64_t seed = 7;
  app.add_option("--bank", bank_path, "question bank file (JSONL)")
      ->capture_default_str();
  app.add_option("--db", db_path, "fixture database file")
      ->capture_default_str();
  app.add_option("--seed", seed, "deterministic seed")->capture_default_str();

  // bank generate|validate
  auto* bank_cmd = app.add_subcommand("bank", "question bank operations");
  auto* generate = bank_cmd->add_subcommand("generate", "generate bank + db");
  int total = 988, simple = 731, complex_count = 257;
  generate->add_option("--total", total)->capture_default_str();
  generate->add_option("--simple", simple)->capture_default_str();
  generate->add_option("--complex", complex_count)->capture_default_str();
  auto* validate = bank_cmd->add_subcommand("validate", "validate bank");
  bank_cmd->require_subcommand(1);

  // eval build|run
  auto* eval_cmd = app.add_subcommand("eval", "evaluation harness");
  auto* build = eval_cmd->add_subcommand("build", "build the paraphrase eval set");
  std::string eval_set_path = "eval_set.jsonl";
  int per_entry = 1;
  build->add_option("--out", eval_set_path)->capture_default_str();
  build->add_option("--per-entry", per_entry)->capture_default_str();
  auto* run = eval_cmd->add_subcommand("run", "run pipeline + scorers");
  std::string out_dir = "eval_out";
  std::string strategies =
      "self_report:straight,self_report:binary,translation,embedding";
  int workers = 1;
  LlmOptions run_llm;
  run->add_option("--eval-set", eval_set_path)->capture_default_str();
  run->add_option("--out-dir", out_dir)->capture_default_str();
  run->add_option("--strategies", strategies)->capture_default_str();
  run->add_option("--workers", workers)->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_llm_options(*run, run_llm);
  eval_cmd->require_subcommand(1);

  // gate
  auto* gate = app.add_subcommand("gate", "answer or abstain on one question");
  std::string question;
  double threshold = 0.85;
  std::string gate_strategy = "embedding";
  int k = 5;
  LlmOptions gate_llm;
  gate->add_option("question", question, "natural-language question")
      ->required();
  gate->add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gate->add_option("--strategy", gate_strategy)->capture_default_str();
  gate->add_option("-k,--k", k)->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_llm_options(*gate, gate_llm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) {
      return cmd_bank_generate(bank_path, db_path, total, simple, complex_count,
                               seed);
    }
    if (validate->parsed()) {
      return cmd_bank_validate(bank_path, db_path);
    }
    if (build->parsed()) {
      return cmd_eval_build(bank_path, db_path, eval_set_path, seed, per_entry);
    }
    if (run->parsed()) {
      return cmd_eval_run(bank_path, db_path, eval_set_path, out_dir,
                          strategies, seed, workers, run_llm);
    }
    if (gate->parsed()) {
      return cmd_gate(question, bank_path, db_path, threshold, seed,
                      gate_strategy, k, gate_llm);
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
