#include "sqlconf/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sqlconf/errors.hpp"
#include "sqlconf/hashing.hpp"

namespace sqlconf::embed {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '_') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace {

// Unigrams carry twice the weight of bigrams so that single-word edits
// between template siblings keep them close in cosine space.
constexpr double kUnigramWeight = 2.0;
constexpr double kBigramWeight = 1.0;

void add_feature(Vector& v, std::string_view feature, double weight) {
  std::uint64_t h = fnv1a64(feature);
  int bucket = static_cast<int>(h % kDimension);
  double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
  v[bucket] += sign * weight;
}

}  // namespace

Vector embed(std::string_view text) {
  Vector v(kDimension, 0.0);
  auto tokens = tokenize(text);
  if (tokens.empty()) return v;
  for (const auto& t : tokens) add_feature(v, t, kUnigramWeight);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    add_feature(v, tokens[i] + " " + tokens[i + 1], kBigramWeight);
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) return v;
  double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ContractError("cosine: dimension mismatch (" +
                        std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

QuestionIndex QuestionIndex::build(
    const std::vector<std::pair<std::string, std::string>>& id_questions) {
  if (id_questions.empty()) {
    throw ContractError("QuestionIndex: cannot build from an empty bank");
  }
  QuestionIndex idx;
  idx.ids_.reserve(id_questions.size());
  idx.vectors_.reserve(id_questions.size());
  for (const auto& [id, question] : id_questions) {
    idx.ids_.push_back(id);
    idx.vectors_.push_back(embed(question));
  }
  return idx;
}

std::vector<SimilarityHit> QuestionIndex::top_k(std::string_view query,
                                                int k) const {
  if (k < 1) throw ContractError("top_k: k must be >= 1");
  Vector q = embed(query);
  std::vector<SimilarityHit> hits;
  hits.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    hits.push_back({ids_[i], cosine(q, vectors_[i])});
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.entry_id < b.entry_id;
  });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(k);
  return hits;
}

}  // namespace sqlconf::embed
