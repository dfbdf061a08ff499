#include "sqlconf/llm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "sqlconf/errors.hpp"
#include "sqlconf/hashing.hpp"

#include <httplib.h>

namespace sqlconf::llm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

const std::map<std::string, std::string>& prompt_templates() {
  static const std::map<std::string, std::string> templates = {
      {"generate_sql",
       "You are a supply chain SQL assistant.\n"
       "Database schema:\n{{schema}}\n"
       "Recognized entities: {{entities}}\n"
       "Solved examples of similar questions:\n{{examples}}\n"
       "Write a SQLite query that answers the question below. Explain your "
       "steps inside <reasoning>...</reasoning> tags and place the final "
       "query in a ```sql fenced block.\n"
       "Question: {{question}}\n"},
      {"selfreport_subtract_100",
       "You generated the SQL below for the question. Start from 100 and "
       "subtract points for every doubt you have about the query. Aim for a "
       "wide distribution of scores that accurately reflects the varying "
       "levels of confidence you have in the generated SQL.\n"
       "Question: {{question}}\nSQL: {{sql}}\nReasoning: {{reasoning}}\n"
       "Report the final score as an integer from 0 to 100 inside "
       "<confidence>...</confidence> tags.\n"},
      {"selfreport_money_betting",
       "You generated the SQL below for the question. Imagine betting on the "
       "correctness of this query. Aim to place bets that accurately reflect "
       "your true confidence in the generated SQL, as if real money were at "
       "stake.\n"
       "Question: {{question}}\nSQL: {{sql}}\nReasoning: {{reasoning}}\n"
       "Report the size of your bet as an integer from 0 to 100 inside "
       "<confidence>...</confidence> tags.\n"},
      {"selfreport_component_weighting",
       "You generated the SQL below for the question. Score each SQL "
       "component (tables, columns, filters, aggregation) separately. "
       "Calculate the overall confidence score by taking the weighted "
       "average of the component scores, with weights determined by the "
       "importance of each component in the given context.\n"
       "Question: {{question}}\nSQL: {{sql}}\nReasoning: {{reasoning}}\n"
       "Report the overall score as an integer from 0 to 100 inside "
       "<confidence>...</confidence> tags.\n"},
      {"selfreport_straight",
       "After generating the SQL query, please take a moment to critically "
       "analyze your output and generate your own confidence score, between "
       "0 and 100, about the generated SQL.\n"
       "Question: {{question}}\nSQL: {{sql}}\nReasoning: {{reasoning}}\n"
       "Report the score inside <confidence>...</confidence> tags.\n"},
      {"selfreport_binary",
       "You generated the SQL below for the question. Generate the binary "
       "judgment of \"confident\" or \"not confident\"; explain why you gave "
       "that classification within the <conf_reason>...</conf_reason> XML "
       "tags.\n"
       "Question: {{question}}\nSQL: {{sql}}\nReasoning: {{reasoning}}\n"},
      {"translate_sql",
       "Given the SQL statement, the reasoning trace, and the execution "
       "result below, write the natural language question that this SQL is "
       "most likely answering. Place the question inside "
       "<question>...</question> tags.\n"
       "SQL: {{sql}}\nReasoning: {{reasoning}}\n"
       "Execution result: {{execution_result}}\n"},
      {"judge_equivalence",
       "Decide whether the two questions below ask for the same thing. Treat "
       "domain terms precisely; for example, quantity (units ordered) and "
       "volume (physical size) are different measures. Answer with "
       "\"equivalent\" or \"not equivalent\" and give a score from 0 to 100 "
       "inside <score>...</score> tags.\n"
       "Original question: {{original_question}}\n"
       "Inferred question: {{inferred_question}}\n"},
  };
  return templates;
}

Prompt render_prompt(const std::string& template_id,
                     const std::map<std::string, std::string>& placeholders) {
  const auto& templates = prompt_templates();
  auto it = templates.find(template_id);
  if (it == templates.end()) {
    throw TemplateError("unknown template: " + template_id);
  }
  std::string text = it->second;
  for (const auto& [name, value] : placeholders) {
    std::string marker = "{{" + name + "}}";
    std::string::size_type pos;
    while ((pos = text.find(marker)) != std::string::npos) {
      text.replace(pos, marker.size(), value);
    }
  }
  auto open = text.find("{{");
  if (open != std::string::npos) {
    auto close = text.find("}}", open);
    std::string name = close == std::string::npos
                           ? text.substr(open + 2)
                           : text.substr(open + 2, close - open - 2);
    throw TemplateError("missing placeholder: " + name);
  }
  return {template_id, text, placeholders};
}

// ---------------------------------------------------------------------------
// Remote backend
// ---------------------------------------------------------------------------

RemoteConfig remote_config_from_env() {
  RemoteConfig cfg;
  if (const char* v = std::getenv("SQLCONF_LLM_ENDPOINT")) cfg.endpoint = v;
  if (const char* v = std::getenv("SQLCONF_LLM_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("SQLCONF_LLM_MODEL")) cfg.model = v;
  if (cfg.endpoint.empty() || cfg.api_key.empty() || cfg.model.empty()) {
    throw ContractError(
        "remote backend requires SQLCONF_LLM_ENDPOINT, SQLCONF_LLM_API_KEY, "
        "and SQLCONF_LLM_MODEL");
  }
  return cfg;
}

Completion RemoteBackend::complete(const Prompt& prompt,
                                   const CallParams& params) {
  if (config_.endpoint.empty()) {
    throw ContractError("remote backend: endpoint not configured");
  }
  json body = {
      {"model", config_.model},
      {"messages",
       json::array({{{"role", "user"}, {"content", prompt.rendered_text}}})},
      {"temperature", params.temperature},
  };
  const std::string payload = body.dump();

  std::string last_error;
  int backoff_ms = config_.initial_backoff_ms;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
    client.set_read_timeout(0, config_.timeout_ms * 1000LL);
    client.set_write_timeout(0, config_.timeout_ms * 1000LL);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post("/v1/chat/completions", headers, payload,
                           "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;  // transport error, retry
    }
    if (res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;  // server error, retry
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(res->status, res->body);
    }
    try {
      json reply = json::parse(res->body);
      Completion out;
      out.backend = "remote";
      out.text = reply.at("choices").at(0).at("message").at("content")
                     .get<std::string>();
      if (reply.contains("usage")) {
        const auto& usage = reply["usage"];
        if (usage.contains("prompt_tokens")) {
          out.prompt_tokens = usage["prompt_tokens"].get<int>();
        }
        if (usage.contains("completion_tokens")) {
          out.completion_tokens = usage["completion_tokens"].get<int>();
        }
      }
      return out;
    } catch (const json::exception& e) {
      throw BackendError(res->status,
                         std::string("unparseable response: ") + e.what());
    }
  }
  throw TransportError("remote backend failed after " +
                       std::to_string(config_.max_attempts) +
                       " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Simulated backend
// ---------------------------------------------------------------------------

void SimulatorConfig::check() const {
  if (corruption_steepness <= 0.0) {
    throw ContractError("simulator: corruption_steepness must be > 0");
  }
  if (corruption_midpoint < 0.0 || corruption_midpoint > 1.0) {
    throw ContractError("simulator: corruption_midpoint must be in [0,1]");
  }
  if (overconfidence_center < 0.0 || overconfidence_center > 1.0) {
    throw ContractError("simulator: overconfidence_center must be in [0,1]");
  }
  if (overconfidence_spread <= 0.0) {
    throw ContractError("simulator: overconfidence_spread must be > 0");
  }
}

SimulatedBackend::SimulatedBackend(SimulatorConfig config)
    : config_(config) {
  config_.check();
}

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::string extract_quoted(const std::string& text) {
  auto open = text.find('"');
  if (open == std::string::npos) return "";
  auto close = text.find('"', open + 1);
  if (close == std::string::npos) return "";
  return text.substr(open + 1, close - open - 1);
}

std::string replace_all_word(std::string text, const std::string& from,
                             const std::string& to) {
  std::string::size_type pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

// Corruption variants; each one is guaranteed to change the result or break
// execution on the fixture data.
std::string perturb_literal(const std::string& sql) {
  auto open = sql.find('\'');
  if (open == std::string::npos) return sql + " LIMIT 0";
  auto close = sql.find('\'', open + 1);
  if (close == std::string::npos) return sql + " LIMIT 0";
  std::string out = sql;
  out.insert(close, "_x9");
  return out;
}

std::string corrupt_sql(const std::string& sql, KeyedRng& rng) {
  switch (rng.next_below(3)) {
    case 1: {
      for (const char* fn : {"SUM(", "AVG(", "MAX(", "MIN(", "COUNT("}) {
        auto pos = sql.find(fn);
        if (pos != std::string::npos) {
          std::string out = sql;
          out.erase(pos, std::string(fn).size() - 1);  // keep the '('
          return out;
        }
      }
      return perturb_literal(sql);
    }
    case 2: {
      const std::pair<const char*, const char*> swaps[] = {
          {"quantity", "on_hand"},     {"on_hand", "quantity"},
          {"unit_price", "lead_time_days"}, {"category", "region"},
          {"order_date", "ship_date"},
      };
      for (const auto& [from, to] : swaps) {
        if (sql.find(from) != std::string::npos) {
          return replace_all_word(sql, from, to);
        }
      }
      return perturb_literal(sql);
    }
    default:
      return perturb_literal(sql);
  }
}

}  // namespace

Completion SimulatedBackend::simulate_generation(
    const bank::EvalCase& eval_case,
    const std::vector<embed::SimilarityHit>& retrieved) const {
  if (retrieved.empty()) {
    throw ContractError("simulate_generation: retrieved examples required");
  }
  double mean = 0.0;
  for (const auto& hit : retrieved) mean += hit.similarity;
  mean /= static_cast<double>(retrieved.size());

  double p_corrupt =
      config_.forced_corruption
          ? *config_.forced_corruption
          : 1.0 / (1.0 + std::exp(-config_.corruption_steepness *
                                  (config_.corruption_midpoint - mean)));

  std::string case_key = eval_case.source_entry_id + "\x1f" + eval_case.question;
  KeyedRng rng(config_.seed, case_key, "generation");
  bool corrupt = rng.next_double() < p_corrupt;
  std::string sql =
      corrupt ? corrupt_sql(eval_case.ground_truth_sql, rng)
              : eval_case.ground_truth_sql;

  Completion out;
  out.backend = "simulated";
  out.text = "<reasoning>Based on the question \"" + eval_case.question +
             "\": filter and aggregate following the retrieved examples."
             "</reasoning>\n```sql\n" + sql + "\n```";
  return out;
}

Completion SimulatedBackend::complete(const Prompt& prompt,
                                      const CallParams& params) {
  Completion out;
  out.backend = "simulated";
  const std::string& id = prompt.template_id;
  std::string draw_key =
      prompt.rendered_text + "#" + std::to_string(params.attempt);

  if (id.rfind("selfreport_", 0) == 0) {
    KeyedRng rng(config_.seed, draw_key, "selfreport");
    // Overconfident regardless of correctness: centered near 0.93.
    double c = clamp01(rng.next_normal(config_.overconfidence_center,
                                       config_.overconfidence_spread));
    if (id == "selfreport_binary") {
      bool confident = c >= 0.5;
      out.text = std::string(confident ? "confident" : "not confident") +
                 " <conf_reason>simulated self-assessment</conf_reason>";
    } else {
      int scaled = static_cast<int>(std::lround(c * 100.0));
      out.text = "<confidence>" + std::to_string(scaled) + "</confidence>";
    }
    return out;
  }

  if (id == "translate_sql") {
    auto it = prompt.placeholders.find("reasoning");
    std::string question =
        it != prompt.placeholders.end() ? extract_quoted(it->second) : "";
    if (question.empty()) question = "What does this query compute?";
    auto sql_it = prompt.placeholders.find("sql");
    std::string sql = sql_it != prompt.placeholders.end() ? sql_it->second : "";
    KeyedRng rng(config_.seed, sql + "\x1f" + question, "hallucinate");
    if (rng.next_double() < 0.25) {
      // The domain-term hallucination the judge is built to catch.
      question = replace_all_word(question, "quantity", "volume");
      question = replace_all_word(question, "Quantity", "Volume");
    }
    out.text = "<question>" + question + "</question>";
    return out;
  }

  if (id == "judge_equivalence") {
    auto orig = prompt.placeholders.find("original_question");
    auto inferred = prompt.placeholders.find("inferred_question");
    bool verdict = orig != prompt.placeholders.end() &&
                   inferred != prompt.placeholders.end() &&
                   lexicon_equivalent(orig->second, inferred->second);
    out.text = std::string(verdict ? "equivalent" : "not equivalent") +
               " <score>" + (verdict ? "100" : "0") + "</score>";
    return out;
  }

  if (id == "generate_sql") {
    // Structured generation goes through simulate_generation; a raw call
    // echoes the closest retrieved example.
    auto it = prompt.placeholders.find("examples");
    std::string sql;
    if (it != prompt.placeholders.end()) {
      auto pos = it->second.find("SQL: ");
      if (pos != std::string::npos) {
        auto end = it->second.find('\n', pos);
        sql = it->second.substr(pos + 5, end - pos - 5);
      }
    }
    out.text = "```sql\n" + sql + "\n```";
    return out;
  }

  throw TemplateError("simulated backend: unsupported template " + id);
}

// ---------------------------------------------------------------------------
// Lexicon judge
// ---------------------------------------------------------------------------

bool lexicon_equivalent(const std::string& a, const std::string& b) {
  auto canonicalize = [](const std::string& text) {
    std::string lowered;
    lowered.reserve(text.size());
    for (char c : text) {
      lowered.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    // Phrase-level synonym classes; longer phrases first. Quantity and
    // volume intentionally stay distinct.
    const std::pair<const char*, const char*> synonyms[] = {
        {"what is the number of", "how many"},
        {"could you tell me", "what is"},
        {"can you tell me", "what is"},
        {"what's", "what is"},
        {"over the last 7 days", "in the last week"},
        {"what amount of", "how much"},
        {"over every site", "across all sites"},
        {"purchased", "ordered"},
    };
    for (const auto& [from, to] : synonyms) {
      std::string::size_type pos = 0;
      std::string f(from), t(to);
      while ((pos = lowered.find(f, pos)) != std::string::npos) {
        lowered.replace(pos, f.size(), t);
        pos += t.size();
      }
    }
    std::set<std::string> tokens;
    for (const auto& t : embed::tokenize(lowered)) tokens.insert(t);
    return tokens;
  };
  return canonicalize(a) == canonicalize(b);
}

}  // namespace sqlconf::llm
