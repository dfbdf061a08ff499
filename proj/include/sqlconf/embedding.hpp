#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sqlconf::embed {

inline constexpr int kDimension = 256;

using Vector = std::vector<double>;

struct SimilarityHit {
  std::string entry_id;
  double similarity = 0.0;
};

// Lowercased word tokens ([a-z0-9_]+); entity identifiers like Apple_1 stay
// whole because '_' is a word character.
std::vector<std::string> tokenize(std::string_view text);

// Feature-hash embedding of unigrams + bigrams into kDimension buckets,
// L2-normalized. Empty text maps to the all-zero vector. Pure function.
Vector embed(std::string_view text);

// Cosine similarity; 0 by convention when either vector is zero.
// Throws ContractError on dimension mismatch.
double cosine(const Vector& a, const Vector& b);

// Immutable top-k index over (id, question) pairs, built once from a bank.
class QuestionIndex {
 public:
  // Throws ContractError on an empty input.
  static QuestionIndex build(
      const std::vector<std::pair<std::string, std::string>>& id_questions);

  std::size_t size() const { return ids_.size(); }

  // Hits sorted by similarity descending, ties broken by entry id ascending.
  // Returns min(k, size) hits.
  std::vector<SimilarityHit> top_k(std::string_view query, int k = 5) const;

 private:
  QuestionIndex() = default;
  std::vector<std::string> ids_;
  std::vector<Vector> vectors_;
};

}  // namespace sqlconf::embed
