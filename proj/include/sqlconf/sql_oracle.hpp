#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

struct sqlite3;

namespace sqlconf::oracle {

struct Null {
  bool operator==(const Null&) const = default;
};

using Cell = std::variant<std::int64_t, double, std::string, Null>;
using Row = std::vector<Cell>;

struct ResultTable {
  std::vector<Row> rows;
  int column_count = 0;
  // True iff the producing query carried an explicit ORDER BY.
  bool ordered = false;
};

nlohmann::json result_to_json(const ResultTable& t);
ResultTable result_from_json(const nlohmann::json& j);

// Compact human-readable rendering, e.g. "[(40,)]".
std::string result_to_string(const ResultTable& t);

struct CorrectnessLabel {
  bool value = false;
};

// Read-only SQL executor over the single-file fixture database.
class FixtureDb {
 public:
  // mode "rw" is only used by the generator when seeding the database.
  static FixtureDb open(const std::string& path, bool read_write = false);
  ~FixtureDb();
  FixtureDb(FixtureDb&&) noexcept;
  FixtureDb& operator=(FixtureDb&&) noexcept;
  FixtureDb(const FixtureDb&) = delete;
  FixtureDb& operator=(const FixtureDb&) = delete;

  // Executes a single read-only statement and returns the full result set.
  // Throws SqlError on syntax errors, unknown identifiers, or non-read
  // statements.
  ResultTable execute(const std::string& sql) const;

  // Generator-only: run DDL/DML while seeding. Throws SqlError.
  void exec_raw(const std::string& sql);

  const std::string& path() const { return path_; }

 private:
  FixtureDb(sqlite3* db, std::string path);
  sqlite3* db_ = nullptr;
  std::string path_;
};

// Result equality per the execution-accuracy convention: equal column counts;
// rows compared as sequences when either side is ordered, as multisets
// otherwise. Numeric cells unify integer/real and compare with tolerance
// 1e-9; text is byte-exact; null equals null.
bool results_match(const ResultTable& a, const ResultTable& b);

// True iff `sql` executes successfully and its result matches ground_truth.
// Execution errors fold into false.
CorrectnessLabel label_correctness(const std::string& sql,
                                   const ResultTable& ground_truth,
                                   const FixtureDb& db);

// Heuristic used to set ResultTable::ordered.
bool has_order_by(const std::string& sql);

}  // namespace sqlconf::oracle
