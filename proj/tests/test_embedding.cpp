#include <doctest.h>

#include <cmath>
#include <random>

#include "sqlconf/embedding.hpp"
#include "sqlconf/errors.hpp"

using namespace sqlconf;
using embed::cosine;
using embed::Vector;

TEST_CASE("embed is deterministic") {
  auto a = embed::embed("What is the total quantity of Apple_1 ordered?");
  auto b = embed::embed("What is the total quantity of Apple_1 ordered?");
  CHECK(a == b);
}

TEST_CASE("embed of empty text is the zero vector") {
  auto v = embed::embed("");
  for (double x : v) CHECK(x == 0.0);
  auto w = embed::embed("   ...   ");
  for (double x : w) CHECK(x == 0.0);
}

TEST_CASE("embed produces unit vectors for non-empty text") {
  for (const char* text : {"hello world", "Apple_1", "a b c d e f g"}) {
    auto v = embed::embed(text);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    CHECK(std::fabs(norm2 - 1.0) < 1e-12);
  }
}

TEST_CASE("near-duplicate questions score higher than unrelated ones") {
  auto base = embed::embed("total quantity of Apple_1");
  auto close = embed::embed("total quantity of Apple_1 ordered");
  auto far = embed::embed("which supplier had the fastest delivery time");
  CHECK(cosine(base, close) > cosine(base, far));
}

TEST_CASE("cosine basics") {
  Vector v(embed::kDimension, 0.0);
  v[0] = 1.0;
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));

  Vector w(embed::kDimension, 0.0);
  w[1] = 1.0;
  CHECK(cosine(v, w) == doctest::Approx(0.0).epsilon(1e-12));

  Vector u(embed::kDimension, 0.0);
  u[0] = 1.0;
  u[1] = 1.0;
  // 1/sqrt(2), checked against direct evaluation of the formula.
  CHECK(std::fabs(cosine(u, v) - 0.70710678118654752) < 1e-9);
}

TEST_CASE("cosine zero-vector convention and dimension mismatch") {
  Vector zero(embed::kDimension, 0.0);
  Vector v(embed::kDimension, 0.0);
  v[3] = 2.0;
  CHECK(cosine(zero, v) == 0.0);
  CHECK(cosine(zero, zero) == 0.0);
  CHECK_THROWS_AS(cosine(Vector(8, 1.0), Vector(9, 1.0)), ContractError);
}

TEST_CASE("cosine properties on random vectors") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(16), b(16);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
    double ab = cosine(a, b);
    CHECK(ab == cosine(b, a));
    CHECK(std::fabs(ab) <= 1.0 + 1e-12);
    double scale = std::uniform_real_distribution<double>(0.01, 50.0)(rng);
    Vector bs = b;
    for (auto& x : bs) x *= scale;
    CHECK(std::fabs(cosine(a, bs) - ab) < 1e-12);
  }
}

TEST_CASE("top_k: self retrieval, truncation, determinism") {
  std::vector<std::pair<std::string, std::string>> bank = {
      {"a", "What is the total quantity of Apple_1 ordered?"},
      {"b", "What is the total quantity of Olive_3 ordered?"},
      {"c", "How many sites have stock-out risk for Mango_2?"},
  };
  auto idx = embed::QuestionIndex::build(bank);
  CHECK(idx.size() == 3);

  auto hits = idx.top_k(bank[0].second, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].entry_id == "a");
  CHECK(std::fabs(hits[0].similarity - 1.0) < 1e-9);

  CHECK(idx.top_k("anything", 10).size() == 3);

  auto idx2 = embed::QuestionIndex::build(bank);
  auto h1 = idx.top_k("quantity ordered", 3);
  auto h2 = idx2.top_k("quantity ordered", 3);
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(h1[i].entry_id == h2[i].entry_id);
    CHECK(h1[i].similarity == h2[i].similarity);
  }
}

TEST_CASE("top_k equals brute-force ranking including tie order") {
  std::mt19937_64 rng(7);
  std::vector<std::pair<std::string, std::string>> bank;
  const char* words[] = {"orders", "inventory", "supplier", "quantity",
                         "site",   "price",     "apple",    "olive"};
  for (int i = 0; i < 150; ++i) {
    std::string q;
    int len = 3 + static_cast<int>(rng() % 6);
    for (int w = 0; w < len; ++w) {
      q += words[rng() % 8];
      q += " ";
    }
    char id[8];
    std::snprintf(id, sizeof(id), "e%03d", i);
    bank.emplace_back(id, q);
  }
  auto idx = embed::QuestionIndex::build(bank);
  std::string query = "orders quantity apple";
  auto hits = idx.top_k(query, 10);

  // Brute force: all pairwise cosines, sorted by (similarity desc, id asc).
  auto qv = embed::embed(query);
  std::vector<embed::SimilarityHit> brute;
  for (const auto& [id, question] : bank) {
    brute.push_back({id, cosine(qv, embed::embed(question))});
  }
  std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.entry_id < b.entry_id;
  });
  REQUIRE(hits.size() == 10);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    CHECK(hits[i].entry_id == brute[i].entry_id);
    CHECK(hits[i].similarity == brute[i].similarity);
  }
}

TEST_CASE("empty bank cannot build an index") {
  CHECK_THROWS_AS(embed::QuestionIndex::build({}), ContractError);
}
