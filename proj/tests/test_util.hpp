#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "sqlconf/bank.hpp"
#include "sqlconf/sql_oracle.hpp"

namespace sqlconf::test {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int i = 0; i < 100; ++i) {
      auto candidate = base / ("sqlconf-" + std::to_string(rd()));
      if (std::filesystem::create_directory(candidate)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline oracle::FixtureDb make_fixture_db(const std::string& path,
                                         std::uint64_t seed = 7) {
  std::filesystem::remove(path);
  auto db = oracle::FixtureDb::open(path, /*read_write=*/true);
  bank::seed_fixture_database(db, seed);
  return db;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace sqlconf::test
