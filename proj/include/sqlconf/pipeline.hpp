#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqlconf/bank.hpp"
#include "sqlconf/embedding.hpp"
#include "sqlconf/llm.hpp"
#include "sqlconf/sql_oracle.hpp"

namespace sqlconf::pipeline {

struct GenerationRecord {
  std::string case_id;
  llm::Prompt prompt;
  std::vector<embed::SimilarityHit> retrieved;  // similarity descending
  std::string generated_sql;
  std::string reasoning;
  std::optional<oracle::ResultTable> execution_result;
  oracle::CorrectnessLabel correct;
  bool malformed = false;  // completion carried no parseable SQL
};

// Lexical entity extraction: case-insensitive exact-token match on Name_N
// identifiers plus topic keyword lookup. Returned in question order, deduped.
std::vector<bank::ContextEntity> extract_entities(
    const std::string& question, const bank::EntityCatalog& catalog);

// First ```sql fenced block or <sql> tagged region; empty when absent.
std::string extract_sql(const std::string& completion_text);
std::string extract_reasoning(const std::string& completion_text);

// The full RAG step: retrieve top-k examples, assemble the generation prompt,
// call the backend, parse and execute the SQL, label correctness.
GenerationRecord generate_sql(const bank::EvalCase& eval_case,
                              const std::string& case_id,
                              const embed::QuestionIndex& index,
                              const bank::QuestionBank& bank,
                              const bank::EntityCatalog& catalog,
                              llm::LlmBackend& backend,
                              const oracle::FixtureDb& db, int k = 5);

}  // namespace sqlconf::pipeline
