#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlconf/sql_oracle.hpp"

namespace sqlconf::bank {

enum class Complexity { kSimple, kComplex };

std::string to_string(Complexity c);
Complexity complexity_from_string(const std::string& s);

struct ContextEntity {
  std::string table;
  std::string id;
  std::string description;
  std::string topic;

  bool operator==(const ContextEntity&) const = default;
};

struct QuestionBankEntry {
  std::string id;
  std::string question;
  std::vector<ContextEntity> context;
  std::string reasoning;
  std::string reference_sql;
  oracle::ResultTable verified_result;
  Complexity complexity = Complexity::kSimple;
};

struct QuestionBank {
  std::vector<QuestionBankEntry> entries;

  const QuestionBankEntry* find(const std::string& id) const;
  std::vector<std::pair<std::string, std::string>> id_questions() const;
};

struct BankConfig {
  int total_count = 988;
  int simple_count = 731;
  int complex_count = 257;
  std::uint64_t seed = 7;
  std::string schema_profile = "supply_chain_v1";

  void check() const;  // throws ContractError when invalid
};

struct ValidationOutcome {
  bool pass = false;
  std::string detail;
};

struct EvalCase {
  std::string source_entry_id;
  std::string question;
  std::map<std::string, std::string> entity_map;
  std::string ground_truth_sql;
  oracle::ResultTable ground_truth_result;
};

struct EvalSet {
  std::vector<EvalCase> cases;
  std::vector<std::string> skipped;  // one report line per skipped case
};

// Catalog of entities known to the fixture database, plus the topic keyword
// table used for lexical entity extraction.
struct CatalogEntity {
  std::string table;
  std::string id;
  std::string description;
};

struct EntityCatalog {
  std::vector<CatalogEntity> entities;
  // keyword (lowercase) -> topic name
  std::map<std::string, std::string> topics;

  const CatalogEntity* find_id(const std::string& id) const;  // case-insensitive
  std::vector<std::string> product_ids() const;
};

// Creates the supply-chain schema (product, orders, inventory, sites,
// suppliers) and fills it deterministically from `seed`. The Apple_1 order
// rows are pinned so that SUM(quantity) is always 40.
void seed_fixture_database(oracle::FixtureDb& db, std::uint64_t seed);

// DDL per table, used both for seeding and as prompt schema context.
const std::map<std::string, std::string>& schema_ddl();

EntityCatalog load_catalog(const oracle::FixtureDb& db);

// Deterministic template-based bank generation; pure function of the seed.
// Throws CapacityError when the template pool cannot cover the requested
// counts. The pinned Apple_1 fixture entry is always the first simple entry.
QuestionBank generate_bank(const BankConfig& config,
                           const oracle::FixtureDb& db);

ValidationOutcome validate_entry(const QuestionBankEntry& entry,
                                 const oracle::FixtureDb& db);

// Deterministic paraphraser: case-insensitive phrase substitutions plus
// entity resampling from a pool of product ids.
struct SynonymRule {
  std::string from;
  std::string to;
};

struct Paraphraser {
  std::vector<SynonymRule> synonyms;
  std::vector<std::string> entity_pool;
  double apply_probability = 0.5;  // per synonym rule
  double entity_swap_probability = 0.9;
};

Paraphraser default_paraphraser(const EntityCatalog& catalog);

// One case per entry per round. Ground truth is recomputed by executing the
// substituted SQL. Cases whose substituted entity is unknown to the catalog
// are skipped and reported.
EvalSet build_eval_set(const QuestionBank& bank, const Paraphraser& paraphraser,
                       const oracle::FixtureDb& db,
                       const EntityCatalog& catalog, std::uint64_t seed,
                       int cases_per_entry = 1);

// Line-delimited JSON persistence (one object per line, UTF-8).
void save_bank(const QuestionBank& bank, const std::string& path);
QuestionBank load_bank(const std::string& path);
void save_eval_set(const EvalSet& set, const std::string& path);
EvalSet load_eval_set(const std::string& path);

}  // namespace sqlconf::bank
