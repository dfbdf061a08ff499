#pragma once

#include <optional>
#include <string>

#include "sqlconf/embedding.hpp"
#include "sqlconf/llm.hpp"
#include "sqlconf/pipeline.hpp"

namespace sqlconf::confidence {

enum class Strategy { kSelfReport, kTranslation, kEmbedding };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct ConfidenceScore {
  Strategy strategy = Strategy::kEmbedding;
  std::string variant;  // prompt-strategy name for self_report
  double score = 0.0;   // always in [0,1]
  std::optional<bool> verdict;  // present for binary strategies; maps to {0,1}
  std::string rationale;
};

struct PromptStrategy {
  std::string name;  // subtract_100 | money_betting | component_weighting |
                     // straight | binary
  std::string template_id;
};

// Throws ContractError for an unknown name.
PromptStrategy prompt_strategy(const std::string& name);
const std::vector<std::string>& prompt_strategy_names();

// Stage 1: ask the generating model to rate its own SQL. Scalar strategies
// normalize 0-100 to [0,1]; the binary strategy yields a verdict with score
// in {0,1}. Unparseable responses are re-asked twice, then ScoringError.
ConfidenceScore score_self_report(llm::LlmBackend& backend,
                                  const pipeline::GenerationRecord& record,
                                  const PromptStrategy& strategy);

// Stage 2: back-translate the SQL into a question and judge equivalence with
// the original. Returns the judge's verdict plus scalar score / 100.
ConfidenceScore score_translation_consistency(
    llm::LlmBackend& backend, const pipeline::GenerationRecord& record,
    const std::string& original_question);

// Stage 3: mean of the top-k cosine similarities against the bank, with
// negative cosines clamped to 0. Pure function, no backend.
ConfidenceScore score_embedding_similarity(const embed::QuestionIndex& index,
                                           const std::string& question,
                                           int k = 5);

}  // namespace sqlconf::confidence
