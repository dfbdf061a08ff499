#include "sqlconf/pipeline.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "sqlconf/errors.hpp"

namespace sqlconf::pipeline {

namespace {

// Word tokens keeping original case, so Name_N identifiers survive intact.
std::vector<std::string> raw_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '_') {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool looks_like_entity_id(const std::string& token) {
  auto underscore = token.find('_');
  if (underscore == std::string::npos || underscore == 0 ||
      underscore + 1 >= token.size()) {
    return false;
  }
  for (std::size_t i = underscore + 1; i < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return false;
  }
  return true;
}

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::vector<bank::ContextEntity> extract_entities(
    const std::string& question, const bank::EntityCatalog& catalog) {
  std::vector<bank::ContextEntity> out;
  std::set<std::string> seen_ids;
  std::set<std::string> seen_topics;
  for (const auto& token : raw_tokens(question)) {
    if (looks_like_entity_id(token)) {
      if (const auto* e = catalog.find_id(token)) {
        if (seen_ids.insert(e->id).second) {
          out.push_back({e->table, e->id, e->description, ""});
        }
        continue;
      }
    }
    auto topic = catalog.topics.find(lower(token));
    if (topic != catalog.topics.end() &&
        seen_topics.insert(topic->second).second) {
      out.push_back({"", "", "", topic->second});
    }
  }
  return out;
}

std::string extract_sql(const std::string& text) {
  auto fence = text.find("```sql");
  if (fence != std::string::npos) {
    auto start = text.find('\n', fence);
    if (start != std::string::npos) {
      auto end = text.find("```", start);
      if (end != std::string::npos) {
        std::string sql = text.substr(start + 1, end - start - 1);
        while (!sql.empty() && (sql.back() == '\n' || sql.back() == ' ')) {
          sql.pop_back();
        }
        return sql;
      }
    }
  }
  auto open = text.find("<sql>");
  if (open != std::string::npos) {
    auto close = text.find("</sql>", open);
    if (close != std::string::npos) {
      return text.substr(open + 5, close - open - 5);
    }
  }
  return "";
}

std::string extract_reasoning(const std::string& text) {
  auto open = text.find("<reasoning>");
  if (open == std::string::npos) return "";
  auto close = text.find("</reasoning>", open);
  if (close == std::string::npos) return "";
  return text.substr(open + 11, close - open - 11);
}

GenerationRecord generate_sql(const bank::EvalCase& eval_case,
                              const std::string& case_id,
                              const embed::QuestionIndex& index,
                              const bank::QuestionBank& bank,
                              const bank::EntityCatalog& catalog,
                              llm::LlmBackend& backend,
                              const oracle::FixtureDb& db, int k) {
  GenerationRecord record;
  record.case_id = case_id;
  record.retrieved = index.top_k(eval_case.question, k);

  auto entities = extract_entities(eval_case.question, catalog);

  // Schema context: tables referenced by extracted entities plus topic tables.
  std::set<std::string> tables;
  std::ostringstream entity_text;
  for (const auto& e : entities) {
    if (!e.table.empty()) {
      tables.insert(e.table);
      entity_text << e.table << ":" << e.id << " ";
    } else {
      tables.insert(e.topic);
      entity_text << "topic:" << e.topic << " ";
    }
  }
  std::ostringstream schema_text;
  const auto& ddl = bank::schema_ddl();
  for (const auto& t : tables) {
    auto it = ddl.find(t);
    if (it != ddl.end()) schema_text << it->second << ";\n";
  }
  if (tables.empty()) {
    for (const auto& [name, stmt] : ddl) schema_text << stmt << ";\n";
  }

  std::ostringstream examples;
  for (const auto& hit : record.retrieved) {
    if (const auto* entry = bank.find(hit.entry_id)) {
      examples << "Q: " << entry->question << "\nSQL: " << entry->reference_sql
               << "\n";
    }
  }

  record.prompt = llm::render_prompt(
      "generate_sql", {{"question", eval_case.question},
                       {"schema", schema_text.str()},
                       {"examples", examples.str()},
                       {"entities", entity_text.str()}});

  llm::Completion completion;
  if (auto* sim = dynamic_cast<llm::SimulatedBackend*>(&backend)) {
    completion = sim->simulate_generation(eval_case, record.retrieved);
  } else {
    completion = backend.complete(record.prompt, {});
  }

  record.generated_sql = extract_sql(completion.text);
  record.reasoning = extract_reasoning(completion.text);
  if (record.generated_sql.empty()) {
    record.malformed = true;
    record.correct = {false};
    return record;
  }
  try {
    record.execution_result = db.execute(record.generated_sql);
    record.correct = {oracle::results_match(*record.execution_result,
                                            eval_case.ground_truth_result)};
  } catch (const SqlError&) {
    record.correct = {false};
  }
  return record;
}

}  // namespace sqlconf::pipeline
