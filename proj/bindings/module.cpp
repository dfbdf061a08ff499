#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include "sqlconf/bank.hpp"
#include "sqlconf/confidence.hpp"
#include "sqlconf/embedding.hpp"
#include "sqlconf/errors.hpp"
#include "sqlconf/eval.hpp"
#include "sqlconf/llm.hpp"
#include "sqlconf/sql_oracle.hpp"

namespace py = pybind11;
using namespace sqlconf;

namespace {

py::object result_to_py(const oracle::ResultTable& t) {
  py::list rows;
  for (const auto& row : t.rows) {
    py::tuple tup(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& cell = row[i];
      if (auto* v = std::get_if<std::int64_t>(&cell)) {
        tup[i] = py::int_(*v);
      } else if (auto* d = std::get_if<double>(&cell)) {
        tup[i] = py::float_(*d);
      } else if (auto* s = std::get_if<std::string>(&cell)) {
        tup[i] = py::str(*s);
      } else {
        tup[i] = py::none();
      }
    }
    rows.append(tup);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Text-to-SQL confidence scoring: embeddings, retrieval, AUROC, "
            "bank generation, and the simulated evaluation harness.";

  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError",
                                               PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  m.def("embed", [](const std::string& text) { return embed::embed(text); },
        py::arg("text"), "Deterministic 256-d feature-hash embedding.");
  m.def("cosine", &embed::cosine, py::arg("a"), py::arg("b"));
  m.def("compute_auroc", &eval::compute_auroc, py::arg("scores"),
        py::arg("labels"),
        "Pairwise AUROC with 0.5 credit for score ties.");

  py::class_<embed::QuestionIndex>(m, "QuestionIndex")
      .def_static("build", &embed::QuestionIndex::build, py::arg("id_questions"))
      .def("__len__", &embed::QuestionIndex::size)
      .def("top_k",
           [](const embed::QuestionIndex& idx, const std::string& query, int k) {
             py::list out;
             for (const auto& hit : idx.top_k(query, k)) {
               out.append(py::make_tuple(hit.entry_id, hit.similarity));
             }
             return out;
           },
           py::arg("query"), py::arg("k") = 5);

  m.def("embedding_confidence",
        [](const embed::QuestionIndex& idx, const std::string& question, int k) {
          return confidence::score_embedding_similarity(idx, question, k).score;
        },
        py::arg("index"), py::arg("question"), py::arg("k") = 5,
        "Mean top-k retrieval similarity, clamped to [0, 1].");

  m.def("generate_bank",
        [](const std::string& bank_path, const std::string& db_path, int total,
           int simple, int complex_count, std::uint64_t seed) {
          std::filesystem::remove(db_path);
          auto db = oracle::FixtureDb::open(db_path, true);
          bank::seed_fixture_database(db, seed);
          bank::BankConfig cfg{total, simple, complex_count, seed};
          auto generated = bank::generate_bank(cfg, db);
          bank::save_bank(generated, bank_path);
          return generated.entries.size();
        },
        py::arg("bank_path"), py::arg("db_path"), py::arg("total") = 988,
        py::arg("simple") = 731, py::arg("complex") = 257, py::arg("seed") = 7,
        "Generate the question bank and fixture database; returns the entry "
        "count.");

  m.def("load_bank_questions",
        [](const std::string& path) {
          return bank::load_bank(path).id_questions();
        },
        py::arg("path"), "List of (entry_id, question) pairs from a bank file.");

  m.def("execute_sql",
        [](const std::string& db_path, const std::string& sql) {
          auto db = oracle::FixtureDb::open(db_path);
          return result_to_py(db.execute(sql));
        },
        py::arg("db_path"), py::arg("sql"),
        "Execute a read-only statement against the fixture database.");

  m.def("results_match",
        [](const std::string& db_path, const std::string& sql_a,
           const std::string& sql_b) {
          auto db = oracle::FixtureDb::open(db_path);
          return oracle::results_match(db.execute(sql_a), db.execute(sql_b));
        },
        py::arg("db_path"), py::arg("sql_a"), py::arg("sql_b"));

  m.def("run_simulated_evaluation",
        [](const std::string& bank_path, const std::string& db_path,
           const std::vector<std::string>& strategies, std::uint64_t seed,
           int workers) {
          auto loaded = bank::load_bank(bank_path);
          auto db = oracle::FixtureDb::open(db_path);
          auto catalog = bank::load_catalog(db);
          auto paraphraser = bank::default_paraphraser(catalog);
          auto set = bank::build_eval_set(loaded, paraphraser, db, catalog, seed);
          llm::SimulatorConfig cfg;
          cfg.seed = seed;
          llm::SimulatedBackend backend(cfg);
          auto run = eval::run_evaluation(loaded, set, backend, strategies,
                                          seed, db_path, workers);
          return py::module_::import("json").attr("loads")(
              eval::build_report(run).dump());
        },
        py::arg("bank_path"), py::arg("db_path"),
        py::arg("strategies") = std::vector<std::string>{"self_report:straight",
                                                         "embedding"},
        py::arg("seed") = 7, py::arg("workers") = 1,
        "Build the paraphrase eval set, run the simulated pipeline, and "
        "return the report as a dict.");
}
