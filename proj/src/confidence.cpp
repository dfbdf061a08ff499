#include "sqlconf/confidence.hpp"

#include <algorithm>
#include <cctype>

#include "sqlconf/errors.hpp"
#include "sqlconf/sql_oracle.hpp"

namespace sqlconf::confidence {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kSelfReport:
      return "self_report";
    case Strategy::kTranslation:
      return "translation";
    case Strategy::kEmbedding:
      return "embedding";
  }
  return "embedding";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "self_report") return Strategy::kSelfReport;
  if (s == "translation") return Strategy::kTranslation;
  if (s == "embedding") return Strategy::kEmbedding;
  throw ContractError("unknown strategy: " + s);
}

const std::vector<std::string>& prompt_strategy_names() {
  static const std::vector<std::string> names = {
      "subtract_100", "money_betting", "component_weighting", "straight",
      "binary"};
  return names;
}

PromptStrategy prompt_strategy(const std::string& name) {
  const auto& names = prompt_strategy_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ContractError("unknown prompt strategy: " + name);
  }
  return {name, "selfreport_" + name};
}

namespace {

constexpr int kMaxAsks = 3;  // one ask plus two re-asks

std::string tag_content(const std::string& text, const std::string& tag) {
  std::string open = "<" + tag + ">";
  std::string close = "</" + tag + ">";
  auto a = text.find(open);
  if (a == std::string::npos) return "";
  auto b = text.find(close, a);
  if (b == std::string::npos) return "";
  return text.substr(a + open.size(), b - a - open.size());
}

std::optional<double> parse_scalar_0_100(const std::string& text) {
  std::string body = tag_content(text, "confidence");
  if (body.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(body, &used);
    while (used < body.size() &&
           std::isspace(static_cast<unsigned char>(body[used]))) {
      ++used;
    }
    if (used != body.size()) return std::nullopt;
    if (v < 0.0 || v > 100.0) return std::nullopt;
    return v / 100.0;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// "not confident" must be checked before "confident".
std::optional<bool> parse_binary_verdict(const std::string& text) {
  std::string lowered;
  lowered.reserve(text.size());
  for (char c : text) {
    lowered.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lowered.find("not confident") != std::string::npos) return false;
  if (lowered.find("confident") != std::string::npos) return true;
  return std::nullopt;
}

}  // namespace

ConfidenceScore score_self_report(llm::LlmBackend& backend,
                                  const pipeline::GenerationRecord& record,
                                  const PromptStrategy& strategy) {
  if (record.generated_sql.empty()) {
    throw ContractError("score_self_report: record has no generated SQL");
  }
  auto question_it = record.prompt.placeholders.find("question");
  std::string question = question_it != record.prompt.placeholders.end()
                             ? question_it->second
                             : "";
  llm::Prompt prompt = llm::render_prompt(
      strategy.template_id, {{"question", question},
                             {"sql", record.generated_sql},
                             {"reasoning", record.reasoning}});

  for (int attempt = 0; attempt < kMaxAsks; ++attempt) {
    llm::Completion completion = backend.complete(prompt, {0.0, attempt});
    ConfidenceScore out;
    out.strategy = Strategy::kSelfReport;
    out.variant = strategy.name;
    if (strategy.name == "binary") {
      auto verdict = parse_binary_verdict(completion.text);
      if (!verdict) continue;
      out.verdict = *verdict;
      out.score = *verdict ? 1.0 : 0.0;
      out.rationale = tag_content(completion.text, "conf_reason");
      return out;
    }
    auto scalar = parse_scalar_0_100(completion.text);
    if (!scalar) continue;
    out.score = *scalar;
    out.rationale = completion.text;
    return out;
  }
  throw ScoringError("self-report response unparseable after " +
                     std::to_string(kMaxAsks) + " attempts (" + strategy.name +
                     ")");
}

ConfidenceScore score_translation_consistency(
    llm::LlmBackend& backend, const pipeline::GenerationRecord& record,
    const std::string& original_question) {
  if (record.generated_sql.empty()) {
    throw ContractError("score_translation_consistency: record has no SQL");
  }
  std::string result_text =
      record.execution_result
          ? oracle::result_to_string(*record.execution_result)
          : "(execution failed)";

  llm::Prompt translate = llm::render_prompt(
      "translate_sql", {{"sql", record.generated_sql},
                        {"reasoning", record.reasoning},
                        {"execution_result", result_text}});
  std::string inferred;
  for (int attempt = 0; attempt < kMaxAsks && inferred.empty(); ++attempt) {
    inferred = tag_content(backend.complete(translate, {0.0, attempt}).text,
                           "question");
  }
  if (inferred.empty()) {
    throw ScoringError("translator output unparseable after " +
                       std::to_string(kMaxAsks) + " attempts");
  }

  llm::Prompt judge = llm::render_prompt(
      "judge_equivalence", {{"original_question", original_question},
                            {"inferred_question", inferred}});
  for (int attempt = 0; attempt < kMaxAsks; ++attempt) {
    std::string reply = backend.complete(judge, {0.0, attempt}).text;
    std::string lowered;
    for (char c : reply) {
      lowered.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    std::optional<bool> verdict;
    if (lowered.find("not equivalent") != std::string::npos) {
      verdict = false;
    } else if (lowered.find("equivalent") != std::string::npos) {
      verdict = true;
    }
    std::string score_body = tag_content(reply, "score");
    if (!verdict || score_body.empty()) continue;
    double scalar;
    try {
      scalar = std::stod(score_body);
    } catch (const std::exception&) {
      continue;
    }
    if (scalar < 0.0 || scalar > 100.0) continue;
    ConfidenceScore out;
    out.strategy = Strategy::kTranslation;
    out.score = scalar / 100.0;
    out.verdict = verdict;
    out.rationale = "inferred: " + inferred;
    return out;
  }
  throw ScoringError("judge output unparseable after " +
                     std::to_string(kMaxAsks) + " attempts");
}

ConfidenceScore score_embedding_similarity(const embed::QuestionIndex& index,
                                           const std::string& question,
                                           int k) {
  auto hits = index.top_k(question, k);
  double sum = 0.0;
  for (const auto& hit : hits) {
    sum += std::max(0.0, hit.similarity);
  }
  ConfidenceScore out;
  out.strategy = Strategy::kEmbedding;
  out.score = hits.empty() ? 0.0
                           : std::min(1.0, sum / static_cast<double>(hits.size()));
  out.rationale = "mean top-" + std::to_string(hits.size()) +
                  " retrieval similarity";
  return out;
}

}  // namespace sqlconf::confidence
