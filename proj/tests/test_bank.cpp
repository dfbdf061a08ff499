#include <doctest.h>

#include <fstream>

#include "sqlconf/bank.hpp"
#include "sqlconf/errors.hpp"
#include "test_util.hpp"

using namespace sqlconf;

TEST_CASE("generate_bank: counts, validation, fixture entry") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"), 3);
  bank::BankConfig cfg{10, 4, 6, 3};
  auto generated = bank::generate_bank(cfg, db);
  REQUIRE(generated.entries.size() == 10);

  int simple = 0, complex_count = 0;
  for (const auto& e : generated.entries) {
    (e.complexity == bank::Complexity::kSimple ? simple : complex_count)++;
    auto outcome = bank::validate_entry(e, db);
    CHECK_MESSAGE(outcome.pass, e.id, ": ", outcome.detail);
  }
  CHECK(simple == 4);
  CHECK(complex_count == 6);

  const auto* fixture = generated.find("fixture-apple-1");
  REQUIRE(fixture != nullptr);
  CHECK(fixture->reference_sql ==
        "SELECT SUM(quantity) FROM orders WHERE product_ID = 'Apple_1'");
  CHECK(oracle::result_to_string(fixture->verified_result) == "[(40,)]");
  CHECK(fixture->question == "What is the total quantity of Apple_1 ordered?");
}

TEST_CASE("generate_bank: single minimal entry validates") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"), 0);
  auto generated = bank::generate_bank({1, 1, 0, 0}, db);
  REQUIRE(generated.entries.size() == 1);
  CHECK(bank::validate_entry(generated.entries[0], db).pass);
}

TEST_CASE("generate_bank is a pure function of the seed") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"), 3);
  auto a = bank::generate_bank({10, 4, 6, 3}, db);
  auto b = bank::generate_bank({10, 4, 6, 3}, db);
  bank::save_bank(a, tmp.file("a.jsonl"));
  bank::save_bank(b, tmp.file("b.jsonl"));
  CHECK(test::slurp(tmp.file("a.jsonl")) == test::slurp(tmp.file("b.jsonl")));

  auto c = bank::generate_bank({10, 4, 6, 4}, db);
  bank::save_bank(c, tmp.file("c.jsonl"));
  CHECK(test::slurp(tmp.file("a.jsonl")) != test::slurp(tmp.file("c.jsonl")));
}

TEST_CASE("generate_bank: capacity and config errors") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  CHECK_THROWS_AS(bank::generate_bank({100000, 100000, 0, 1}, db),
                  CapacityError);
  CHECK_THROWS_AS(bank::generate_bank({10, 5, 6, 1}, db), ContractError);
  CHECK_THROWS_AS(bank::generate_bank({-1, -1, 0, 1}, db), ContractError);
}

TEST_CASE("validate_entry: mismatch and malformed SQL fail without throwing") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto generated = bank::generate_bank({2, 1, 1, 1}, db);

  auto bad_result = generated.entries[0];
  bad_result.verified_result.rows[0][0] = std::int64_t{41};
  auto outcome = bank::validate_entry(bad_result, db);
  CHECK_FALSE(outcome.pass);
  CHECK(outcome.detail.find("mismatch") != std::string::npos);

  auto bad_sql = generated.entries[0];
  bad_sql.reference_sql = "SELEC broken";
  auto outcome2 = bank::validate_entry(bad_sql, db);
  CHECK_FALSE(outcome2.pass);
  CHECK(outcome2.detail.find("error") != std::string::npos);
}

TEST_CASE("save/load round-trip and error paths") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto generated = bank::generate_bank({12, 7, 5, 9}, db);
  bank::save_bank(generated, tmp.file("bank.jsonl"));
  auto loaded = bank::load_bank(tmp.file("bank.jsonl"));
  bank::save_bank(loaded, tmp.file("bank2.jsonl"));
  CHECK(test::slurp(tmp.file("bank.jsonl")) ==
        test::slurp(tmp.file("bank2.jsonl")));

  {
    std::ofstream out(tmp.file("empty.jsonl"));
  }
  CHECK(bank::load_bank(tmp.file("empty.jsonl")).entries.empty());

  {
    std::ofstream out(tmp.file("broken.jsonl"));
    out << "{\"id\": \"ok\"";  // truncated record
  }
  try {
    bank::load_bank(tmp.file("broken.jsonl"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("build_eval_set: identity paraphrase reproduces the entry") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto catalog = bank::load_catalog(db);
  auto generated = bank::generate_bank({5, 3, 2, 2}, db);

  bank::Paraphraser identity;  // no synonyms, no entity pool
  auto set = bank::build_eval_set(generated, identity, db, catalog, 0);
  REQUIRE(set.cases.size() == 5);
  CHECK(set.skipped.empty());
  for (std::size_t i = 0; i < set.cases.size(); ++i) {
    CHECK(set.cases[i].question == generated.entries[i].question);
    CHECK(set.cases[i].ground_truth_sql == generated.entries[i].reference_sql);
    CHECK(set.cases[i].entity_map.empty());
    CHECK(oracle::results_match(set.cases[i].ground_truth_result,
                                generated.entries[i].verified_result));
  }
}

TEST_CASE("build_eval_set: pinned paraphrase matches the expected variant") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto catalog = bank::load_catalog(db);

  bank::QuestionBank single;
  bank::QuestionBankEntry entry;
  entry.id = "sales-apple";
  entry.question = "What's the sales order of Apple_1 in the last week?";
  entry.context.push_back({"product", "Apple_1", "Apple", ""});
  entry.reasoning = "Based on the question \"" + entry.question + "\".";
  entry.reference_sql =
      "SELECT order_ID, quantity FROM orders WHERE product_ID = 'Apple_1' "
      "AND order_date >= '2024-03-25' ORDER BY order_date";
  entry.verified_result = db.execute(entry.reference_sql);
  single.entries.push_back(entry);

  bank::Paraphraser pinned;
  pinned.synonyms = {{"what's", "could you tell me"},
                     {"in the last week", "over the last 7 days"}};
  pinned.entity_pool = {"Olive_3"};
  pinned.apply_probability = 1.0;
  pinned.entity_swap_probability = 1.0;

  auto set = bank::build_eval_set(single, pinned, db, catalog, 11);
  REQUIRE(set.cases.size() == 1);
  const auto& c = set.cases[0];
  CHECK(c.question ==
        "Could you tell me the sales order of Olive_3 over the last 7 days?");
  REQUIRE(c.entity_map.size() == 1);
  CHECK(c.entity_map.at("Apple_1") == "Olive_3");
  CHECK(c.ground_truth_sql.find("Olive_3") != std::string::npos);
  CHECK(c.ground_truth_sql.find("Apple_1") == std::string::npos);
  // Ground truth equals direct execution of the substituted SQL.
  CHECK(oracle::results_match(c.ground_truth_result,
                              db.execute(c.ground_truth_sql)));
}

TEST_CASE("build_eval_set: unknown substituted entity is skipped and reported") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto catalog = bank::load_catalog(db);
  auto generated = bank::generate_bank({3, 2, 1, 5}, db);

  bank::Paraphraser bogus;
  bogus.entity_pool = {"Ghost_9"};
  bogus.entity_swap_probability = 1.0;
  auto set = bank::build_eval_set(generated, bogus, db, catalog, 5);
  CHECK(set.cases.empty());
  CHECK(set.skipped.size() == 3);
  CHECK(set.skipped[0].find("Ghost_9") != std::string::npos);
}

TEST_CASE("build_eval_set is deterministic in the seed") {
  test::TempDir tmp;
  auto db = test::make_fixture_db(tmp.file("f.db"));
  auto catalog = bank::load_catalog(db);
  auto generated = bank::generate_bank({20, 14, 6, 2}, db);
  auto paraphraser = bank::default_paraphraser(catalog);

  auto a = bank::build_eval_set(generated, paraphraser, db, catalog, 13);
  auto b = bank::build_eval_set(generated, paraphraser, db, catalog, 13);
  bank::save_eval_set(a, tmp.file("a.jsonl"));
  bank::save_eval_set(b, tmp.file("b.jsonl"));
  CHECK(test::slurp(tmp.file("a.jsonl")) == test::slurp(tmp.file("b.jsonl")));

  // Every case's ground truth is reproducible by executing its SQL.
  for (const auto& c : a.cases) {
    CHECK(oracle::results_match(c.ground_truth_result,
                                db.execute(c.ground_truth_sql)));
  }

  auto loaded = bank::load_eval_set(tmp.file("a.jsonl"));
  bank::save_eval_set({loaded.cases, {}}, tmp.file("c.jsonl"));
  CHECK(test::slurp(tmp.file("a.jsonl")) == test::slurp(tmp.file("c.jsonl")));
}
