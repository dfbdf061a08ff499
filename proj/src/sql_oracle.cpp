#include "sqlconf/sql_oracle.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "sqlconf/errors.hpp"

namespace sqlconf::oracle {

FixtureDb::FixtureDb(sqlite3* db, std::string path)
    : db_(db), path_(std::move(path)) {}

FixtureDb FixtureDb::open(const std::string& path, bool read_write) {
  sqlite3* db = nullptr;
  int flags = read_write ? (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE)
                         : SQLITE_OPEN_READONLY;
  int rc = sqlite3_open_v2(path.c_str(), &db, flags, nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
    if (db) sqlite3_close(db);
    throw SqlError("cannot open database '" + path + "': " + msg);
  }
  return FixtureDb(db, path);
}

FixtureDb::~FixtureDb() {
  if (db_) sqlite3_close(db_);
}

FixtureDb::FixtureDb(FixtureDb&& other) noexcept
    : db_(other.db_), path_(std::move(other.path_)) {
  other.db_ = nullptr;
}

FixtureDb& FixtureDb::operator=(FixtureDb&& other) noexcept {
  if (this != &other) {
    if (db_) sqlite3_close(db_);
    db_ = other.db_;
    path_ = std::move(other.path_);
    other.db_ = nullptr;
  }
  return *this;
}

void FixtureDb::exec_raw(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw SqlError(msg);
  }
}

ResultTable FixtureDb::execute(const std::string& sql) const {
  sqlite3_stmt* stmt = nullptr;
  const char* tail = nullptr;
  int rc = sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, &tail);
  if (rc != SQLITE_OK) {
    std::string msg = sqlite3_errmsg(db_);
    if (stmt) sqlite3_finalize(stmt);
    throw SqlError("SQL error: " + msg);
  }
  if (!stmt) throw SqlError("SQL error: empty statement");
  if (tail) {
    for (const char* p = tail; *p; ++p) {
      if (!std::isspace(static_cast<unsigned char>(*p)) && *p != ';') {
        sqlite3_finalize(stmt);
        throw SqlError("SQL error: multiple statements are not allowed");
      }
    }
  }
  if (!sqlite3_stmt_readonly(stmt)) {
    sqlite3_finalize(stmt);
    throw SqlError("SQL error: non-read statement rejected");
  }

  ResultTable table;
  table.column_count = sqlite3_column_count(stmt);
  table.ordered = has_order_by(sql);
  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    Row row;
    row.reserve(table.column_count);
    for (int i = 0; i < table.column_count; ++i) {
      switch (sqlite3_column_type(stmt, i)) {
        case SQLITE_INTEGER:
          row.emplace_back(
              static_cast<std::int64_t>(sqlite3_column_int64(stmt, i)));
          break;
        case SQLITE_FLOAT:
          row.emplace_back(sqlite3_column_double(stmt, i));
          break;
        case SQLITE_NULL:
          row.emplace_back(Null{});
          break;
        default:
          row.emplace_back(std::string(reinterpret_cast<const char*>(
              sqlite3_column_text(stmt, i))));
          break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    std::string msg = sqlite3_errmsg(db_);
    sqlite3_finalize(stmt);
    throw SqlError("SQL error: " + msg);
  }
  sqlite3_finalize(stmt);
  return table;
}

bool has_order_by(const std::string& sql) {
  // Case-insensitive scan outside string literals.
  std::string lowered;
  lowered.reserve(sql.size());
  bool in_string = false;
  for (char c : sql) {
    if (c == '\'') in_string = !in_string;
    lowered.push_back(in_string ? ' '
                                : static_cast<char>(std::tolower(
                                      static_cast<unsigned char>(c))));
  }
  std::istringstream iss(lowered);
  std::string prev, word;
  while (iss >> word) {
    if (prev == "order" && word == "by") return true;
    prev = word;
  }
  return false;
}

namespace {

constexpr double kNumericTolerance = 1e-9;

bool cells_equal(const Cell& a, const Cell& b) {
  const bool a_null = std::holds_alternative<Null>(a);
  const bool b_null = std::holds_alternative<Null>(b);
  if (a_null || b_null) return a_null && b_null;
  const bool a_num = !std::holds_alternative<std::string>(a);
  const bool b_num = !std::holds_alternative<std::string>(b);
  if (a_num != b_num) return false;
  if (!a_num) return std::get<std::string>(a) == std::get<std::string>(b);
  auto as_double = [](const Cell& c) {
    if (auto* i = std::get_if<std::int64_t>(&c))
      return static_cast<double>(*i);
    return std::get<double>(c);
  };
  return std::fabs(as_double(a) - as_double(b)) <= kNumericTolerance;
}

bool rows_equal(const Row& a, const Row& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!cells_equal(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool results_match(const ResultTable& a, const ResultTable& b) {
  if (a.column_count != b.column_count) return false;
  if (a.rows.size() != b.rows.size()) return false;
  if (a.ordered || b.ordered) {
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (!rows_equal(a.rows[i], b.rows[i])) return false;
    }
    return true;
  }
  // Multiset match via greedy pairing; tables are small and the tolerance
  // makes sort-based canonicalization unreliable near ties.
  std::vector<bool> used(b.rows.size(), false);
  for (const Row& ra : a.rows) {
    bool matched = false;
    for (std::size_t j = 0; j < b.rows.size(); ++j) {
      if (!used[j] && rows_equal(ra, b.rows[j])) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

CorrectnessLabel label_correctness(const std::string& sql,
                                   const ResultTable& ground_truth,
                                   const FixtureDb& db) {
  try {
    ResultTable result = db.execute(sql);
    return {results_match(result, ground_truth)};
  } catch (const SqlError&) {
    return {false};
  }
}

nlohmann::json result_to_json(const ResultTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Row& row : t.rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const Cell& c : row) {
      if (auto* i = std::get_if<std::int64_t>(&c)) {
        jrow.push_back(*i);
      } else if (auto* d = std::get_if<double>(&c)) {
        jrow.push_back(*d);
      } else if (auto* s = std::get_if<std::string>(&c)) {
        jrow.push_back(*s);
      } else {
        jrow.push_back(nullptr);
      }
    }
    rows.push_back(std::move(jrow));
  }
  return {{"rows", rows},
          {"column_count", t.column_count},
          {"ordered", t.ordered}};
}

ResultTable result_from_json(const nlohmann::json& j) {
  ResultTable t;
  t.column_count = j.at("column_count").get<int>();
  t.ordered = j.at("ordered").get<bool>();
  for (const auto& jrow : j.at("rows")) {
    Row row;
    for (const auto& cell : jrow) {
      if (cell.is_null()) {
        row.emplace_back(Null{});
      } else if (cell.is_number_integer()) {
        row.emplace_back(cell.get<std::int64_t>());
      } else if (cell.is_number_float()) {
        row.emplace_back(cell.get<double>());
      } else if (cell.is_string()) {
        row.emplace_back(cell.get<std::string>());
      } else {
        throw ParseError("unsupported cell type in result table");
      }
    }
    if (static_cast<int>(row.size()) != t.column_count) {
      throw ParseError("row width does not match column_count");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string result_to_string(const ResultTable& t) {
  std::ostringstream out;
  out << "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (r) out << ", ";
    out << "(";
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      const Cell& cell = t.rows[r][c];
      if (auto* i = std::get_if<std::int64_t>(&cell)) {
        out << *i;
      } else if (auto* d = std::get_if<double>(&cell)) {
        out << *d;
      } else if (auto* s = std::get_if<std::string>(&cell)) {
        out << "'" << *s << "'";
      } else {
        out << "NULL";
      }
      if (t.rows[r].size() == 1) {
        out << ",";
      } else if (c + 1 < t.rows[r].size()) {
        out << ", ";
      }
    }
    out << ")";
  }
  out << "]";
  return out.str();
}

}  // namespace sqlconf::oracle
