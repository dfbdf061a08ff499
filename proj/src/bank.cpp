#include "sqlconf/bank.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sqlconf/errors.hpp"
#include "sqlconf/hashing.hpp"

namespace sqlconf::bank {

using nlohmann::json;

std::string to_string(Complexity c) {
  return c == Complexity::kSimple ? "simple" : "complex";
}

Complexity complexity_from_string(const std::string& s) {
  if (s == "simple") return Complexity::kSimple;
  if (s == "complex") return Complexity::kComplex;
  throw ParseError("unknown complexity: " + s);
}

const QuestionBankEntry* QuestionBank::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<std::pair<std::string, std::string>> QuestionBank::id_questions()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.emplace_back(e.id, e.question);
  return out;
}

void BankConfig::check() const {
  if (total_count < 0 || simple_count < 0 || complex_count < 0) {
    throw ContractError("bank config: counts must be non-negative");
  }
  if (simple_count + complex_count != total_count) {
    throw ContractError("bank config: simple_count + complex_count must equal total_count");
  }
}

// ---------------------------------------------------------------------------
// Fixture database
// ---------------------------------------------------------------------------

namespace {

const char* const kProductNames[] = {
    "Apple",  "Olive",  "Banana", "Cherry", "Mango",  "Grape",  "Lemon",
    "Peach",  "Pear",   "Plum",   "Walnut", "Almond", "Cashew", "Pecan",
    "Barley", "Wheat",  "Oat",    "Rice",   "Sugar",  "Salt",   "Pepper",
    "Honey",  "Cocoa",  "Coffee", "Tea",    "Basil",  "Thyme",  "Ginger",
    "Garlic", "Onion",  "Carrot", "Potato", "Tomato", "Spinach"};
constexpr int kVariantsPerName = 3;
constexpr int kSiteCount = 8;
constexpr int kSupplierCount = 12;

const char* const kCategories[] = {"produce", "grains", "spices", "beverages",
                                   "pantry"};
const char* const kRegions[] = {"NA", "EU", "APAC", "LATAM"};

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string pad2(int v) {
  return (v < 10 ? "0" : "") + std::to_string(v);
}

}  // namespace

const std::map<std::string, std::string>& schema_ddl() {
  static const std::map<std::string, std::string> ddl = {
      {"product",
       "CREATE TABLE product (product_ID TEXT PRIMARY KEY, name TEXT, "
       "category TEXT, unit_price REAL)"},
      {"sites",
       "CREATE TABLE sites (site_ID TEXT PRIMARY KEY, name TEXT, region TEXT)"},
      {"suppliers",
       "CREATE TABLE suppliers (supplier_ID TEXT, name TEXT, product_ID TEXT, "
       "lead_time_days INTEGER)"},
      {"orders",
       "CREATE TABLE orders (order_ID INTEGER PRIMARY KEY, product_ID TEXT, "
       "site_ID TEXT, quantity INTEGER, order_date TEXT)"},
      {"inventory",
       "CREATE TABLE inventory (product_ID TEXT, site_ID TEXT, on_hand "
       "INTEGER, reorder_point INTEGER)"},
  };
  return ddl;
}

void seed_fixture_database(oracle::FixtureDb& db, std::uint64_t seed) {
  KeyedRng rng(seed, "fixture", "data");
  db.exec_raw("BEGIN");
  for (const auto& [table, ddl] : schema_ddl()) {
    db.exec_raw(ddl);
  }

  std::vector<std::string> products;
  for (const char* name : kProductNames) {
    for (int v = 1; v <= kVariantsPerName; ++v) {
      products.push_back(std::string(name) + "_" + std::to_string(v));
    }
  }

  for (const auto& pid : products) {
    std::string base = pid.substr(0, pid.find('_'));
    std::string category = kCategories[rng.next_below(5)];
    double price = static_cast<double>(100 + rng.next_below(9900)) / 100.0;
    std::ostringstream sql;
    sql << "INSERT INTO product VALUES (" << quote(pid) << ", " << quote(base)
        << ", " << quote(category) << ", " << price << ")";
    db.exec_raw(sql.str());
  }

  for (int i = 1; i <= kSiteCount; ++i) {
    std::string sid = "Site_" + std::to_string(i);
    db.exec_raw("INSERT INTO sites VALUES (" + quote(sid) + ", " +
                quote("Warehouse " + std::to_string(i)) + ", " +
                quote(kRegions[(i - 1) % 4]) + ")");
  }

  for (const auto& pid : products) {
    int links = 1 + static_cast<int>(rng.next_below(3));
    int start = static_cast<int>(rng.next_below(kSupplierCount));
    for (int l = 0; l < links; ++l) {
      int s = (start + l) % kSupplierCount + 1;
      int lead = 2 + static_cast<int>(rng.next_below(28));
      db.exec_raw("INSERT INTO suppliers VALUES (" +
                  quote("Supplier_" + std::to_string(s)) + ", " +
                  quote("Supplier " + std::to_string(s)) + ", " + quote(pid) +
                  ", " + std::to_string(lead) + ")");
    }
  }

  // Dataset window: 2024-01-01 .. 2024-03-31; "last week" means >= 2024-03-25.
  long order_id = 1;
  auto insert_order = [&](const std::string& pid, const std::string& site,
                          int qty, const std::string& date) {
    db.exec_raw("INSERT INTO orders VALUES (" + std::to_string(order_id++) +
                ", " + quote(pid) + ", " + quote(site) + ", " +
                std::to_string(qty) + ", " + quote(date) + ")");
  };
  for (const auto& pid : products) {
    if (pid == "Apple_1") {
      // Pinned rows behind the Apple_1 fixture entry: 15 + 25 = 40.
      insert_order(pid, "Site_1", 15, "2024-02-10");
      insert_order(pid, "Site_2", 25, "2024-03-27");
      continue;
    }
    int n = 2 + static_cast<int>(rng.next_below(4));
    for (int i = 0; i < n; ++i) {
      int qty = 5 + static_cast<int>(rng.next_below(90));
      std::string site = "Site_" + std::to_string(1 + rng.next_below(kSiteCount));
      std::string date;
      if (i == 0) {
        // Every product has at least one last-week order.
        date = "2024-03-" + std::to_string(25 + rng.next_below(6));
      } else {
        int month = 1 + static_cast<int>(rng.next_below(3));
        int max_day = month == 3 ? 24 : 28;
        int day = 1 + static_cast<int>(rng.next_below(max_day));
        date = "2024-" + pad2(month) + "-" + pad2(day);
      }
      insert_order(pid, site, qty, date);
    }
  }

  for (const auto& pid : products) {
    int m = 1 + static_cast<int>(rng.next_below(4));
    int start = static_cast<int>(rng.next_below(kSiteCount));
    for (int i = 0; i < m; ++i) {
      std::string site = "Site_" + std::to_string((start + i) % kSiteCount + 1);
      int on_hand = static_cast<int>(rng.next_below(200));
      int reorder = 20 + static_cast<int>(rng.next_below(60));
      db.exec_raw("INSERT INTO inventory VALUES (" + quote(pid) + ", " +
                  quote(site) + ", " + std::to_string(on_hand) + ", " +
                  std::to_string(reorder) + ")");
    }
  }
  db.exec_raw("COMMIT");
}

const CatalogEntity* EntityCatalog::find_id(const std::string& id) const {
  auto lower = [](const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  std::string needle = lower(id);
  for (const auto& e : entities) {
    if (lower(e.id) == needle) return &e;
  }
  return nullptr;
}

std::vector<std::string> EntityCatalog::product_ids() const {
  std::vector<std::string> out;
  for (const auto& e : entities) {
    if (e.table == "product") out.push_back(e.id);
  }
  return out;
}

EntityCatalog load_catalog(const oracle::FixtureDb& db) {
  EntityCatalog catalog;
  auto add_from = [&](const std::string& table, const std::string& id_col,
                      const std::string& desc_col) {
    auto result = db.execute("SELECT " + id_col + ", " + desc_col + " FROM " +
                             table + " ORDER BY " + id_col);
    for (const auto& row : result.rows) {
      catalog.entities.push_back({table, std::get<std::string>(row[0]),
                                  std::get<std::string>(row[1])});
    }
  };
  add_from("product", "product_ID", "name");
  add_from("sites", "site_ID", "name");
  {
    auto result = db.execute(
        "SELECT supplier_ID, MIN(name) FROM suppliers GROUP BY supplier_ID "
        "ORDER BY supplier_ID");
    for (const auto& row : result.rows) {
      catalog.entities.push_back({"suppliers", std::get<std::string>(row[0]),
                                  std::get<std::string>(row[1])});
    }
  }
  catalog.topics = {
      {"order", "orders"},      {"orders", "orders"},
      {"ordered", "orders"},    {"purchased", "orders"},
      {"sales", "orders"},      {"inventory", "inventory"},
      {"stock", "inventory"},   {"reorder", "inventory"},
      {"price", "product"},     {"category", "product"},
      {"supplier", "suppliers"}, {"site", "sites"},
      {"sites", "sites"},
  };
  return catalog;
}

// ---------------------------------------------------------------------------
// Question templates
// ---------------------------------------------------------------------------

namespace {

struct QuestionTemplate {
  const char* name;
  Complexity complexity;
  const char* question;   // {P} = product id
  const char* sql;        // {P} = product id
  const char* reasoning;  // {P} = product id, appended after the quoted question
  const char* topic;
};

const QuestionTemplate kTemplates[] = {
    {"total_quantity", Complexity::kSimple,
     "What is the total quantity of {P} ordered?",
     "SELECT SUM(quantity) FROM orders WHERE product_ID = '{P}'",
     "{P} refers to a product ID in the product table. This ID is used to "
     "filter the orders table. The goal is to sum the quantity for this "
     "product.",
     "orders"},
    {"order_count", Complexity::kSimple,
     "How many orders have been placed for {P}?",
     "SELECT COUNT(*) FROM orders WHERE product_ID = '{P}'",
     "{P} is a product ID; count the matching rows in the orders table.",
     "orders"},
    {"sales_last_week", Complexity::kSimple,
     "What's the sales order of {P} in the last week?",
     "SELECT order_ID, quantity FROM orders WHERE product_ID = '{P}' AND "
     "order_date >= '2024-03-25' ORDER BY order_date",
     "{P} is a product ID; list its orders with order_date in the trailing "
     "seven-day window of the dataset.",
     "orders"},
    {"avg_order_quantity", Complexity::kSimple,
     "What is the average order quantity for {P}?",
     "SELECT AVG(quantity) FROM orders WHERE product_ID = '{P}'",
     "{P} is a product ID; average the quantity column over its orders.",
     "orders"},
    {"unit_price", Complexity::kSimple,
     "What is the unit price of product {P}?",
     "SELECT unit_price FROM product WHERE product_ID = '{P}'",
     "{P} is a product ID; read unit_price from the product table.",
     "product"},
    {"max_order", Complexity::kSimple,
     "What is the largest single order quantity of {P}?",
     "SELECT MAX(quantity) FROM orders WHERE product_ID = '{P}'",
     "{P} is a product ID; take the maximum quantity over its orders.",
     "orders"},
    {"total_on_hand", Complexity::kSimple,
     "How much on hand inventory of {P} is available across all sites?",
     "SELECT SUM(on_hand) FROM inventory WHERE product_ID = '{P}'",
     "{P} is a product ID; sum on_hand over its inventory rows.",
     "inventory"},
    {"category", Complexity::kSimple,
     "Which category does the product {P} belong to?",
     "SELECT category FROM product WHERE product_ID = '{P}'",
     "{P} is a product ID; read category from the product table.",
     "product"},
    {"stocking_sites", Complexity::kSimple,
     "How many sites currently stock the product {P}?",
     "SELECT COUNT(*) FROM inventory WHERE product_ID = '{P}'",
     "{P} is a product ID; count its inventory rows, one per stocking site.",
     "inventory"},
    {"latest_order_date", Complexity::kSimple,
     "What is the most recent order date for {P}?",
     "SELECT MAX(order_date) FROM orders WHERE product_ID = '{P}'",
     "{P} is a product ID; take the maximum order_date over its orders.",
     "orders"},
    {"stockout_risk", Complexity::kComplex,
     "How many sites have stock-out risk for {P}?",
     "SELECT COUNT(*) FROM inventory WHERE product_ID = '{P}' AND on_hand < "
     "reorder_point",
     "Stock-out risk means on_hand below reorder_point; {P} is a product ID; "
     "count the inventory rows that satisfy the business rule.",
     "inventory"},
    {"fastest_supplier", Complexity::kComplex,
     "Which supplier offers the shortest lead time for the product {P}?",
     "SELECT supplier_ID FROM suppliers WHERE product_ID = '{P}' ORDER BY "
     "lead_time_days ASC, supplier_ID ASC LIMIT 1",
     "{P} is a product ID; rank its supplier links by lead_time_days and "
     "return the fastest one.",
     "suppliers"},
    {"inventory_value", Complexity::kComplex,
     "What is the total inventory value of {P} across all sites?",
     "SELECT SUM(inventory.on_hand * product.unit_price) FROM inventory JOIN "
     "product ON inventory.product_ID = product.product_ID WHERE "
     "inventory.product_ID = '{P}'",
     "Inventory value is on_hand times unit_price; {P} is a product ID; join "
     "inventory with product and sum the product of the two columns.",
     "inventory"},
    {"units_last_week", Complexity::kComplex,
     "How many units of {P} were ordered in the last week?",
     "SELECT SUM(quantity) FROM orders WHERE product_ID = '{P}' AND "
     "order_date >= '2024-03-25'",
     "{P} is a product ID; sum quantity over its orders within the trailing "
     "seven-day window of the dataset.",
     "orders"},
    {"largest_stock_site", Complexity::kComplex,
     "Which site holds the largest on hand stock of {P}?",
     "SELECT site_ID FROM inventory WHERE product_ID = '{P}' ORDER BY on_hand "
     "DESC, site_ID ASC LIMIT 1",
     "{P} is a product ID; rank its inventory rows by on_hand and return the "
     "top site.",
     "inventory"},
    {"distinct_order_sites", Complexity::kComplex,
     "How many distinct sites have received orders for {P}?",
     "SELECT COUNT(DISTINCT site_ID) FROM orders WHERE product_ID = '{P}'",
     "{P} is a product ID; count distinct site_ID values over its orders.",
     "orders"},
    {"reorder_gap", Complexity::kComplex,
     "What is the total reorder shortfall of {P} across all sites?",
     "SELECT SUM(reorder_point - on_hand) FROM inventory WHERE product_ID = "
     "'{P}' AND on_hand < reorder_point",
     "Reorder shortfall is reorder_point minus on_hand where stock is below "
     "the reorder point; {P} is a product ID; sum the shortfall over its "
     "inventory rows.",
     "inventory"},
};

std::string fill(const std::string& pattern, const std::string& product) {
  std::string out = pattern;
  std::string::size_type pos;
  while ((pos = out.find("{P}")) != std::string::npos) {
    out.replace(pos, 3, product);
  }
  return out;
}

QuestionBankEntry instantiate(const QuestionTemplate& t,
                              const std::string& product,
                              const std::string& base_name,
                              const std::string& id,
                              const oracle::FixtureDb& db) {
  QuestionBankEntry e;
  e.id = id;
  e.question = fill(t.question, product);
  e.context.push_back({"product", product, base_name, ""});
  e.context.push_back({"", "", "", t.topic});
  e.reasoning = "Based on the question \"" + e.question + "\": " +
                fill(t.reasoning, product);
  e.reference_sql = fill(t.sql, product);
  e.verified_result = db.execute(e.reference_sql);
  e.complexity = t.complexity;
  return e;
}

}  // namespace

QuestionBank generate_bank(const BankConfig& config,
                           const oracle::FixtureDb& db) {
  config.check();
  EntityCatalog catalog = load_catalog(db);
  auto products = catalog.product_ids();

  std::vector<std::pair<const QuestionTemplate*, std::string>> simple_pool;
  std::vector<std::pair<const QuestionTemplate*, std::string>> complex_pool;
  const QuestionTemplate* fixture_template = nullptr;
  for (const auto& t : kTemplates) {
    if (std::string(t.name) == "total_quantity") fixture_template = &t;
    for (const auto& p : products) {
      if (std::string(t.name) == "total_quantity" && p == "Apple_1") {
        continue;  // reserved for the fixture entry
      }
      (t.complexity == Complexity::kSimple ? simple_pool : complex_pool)
          .emplace_back(&t, p);
    }
  }

  auto shuffle = [&](auto& pool, const char* label) {
    KeyedRng rng(config.seed, "bank-shuffle", label);
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::swap(pool[i - 1], pool[rng.next_below(i)]);
    }
  };
  shuffle(simple_pool, "simple");
  shuffle(complex_pool, "complex");

  int simple_needed = config.simple_count;
  bool with_fixture = simple_needed >= 1;
  if (with_fixture) simple_needed -= 1;
  if (simple_needed > static_cast<int>(simple_pool.size())) {
    throw CapacityError("template pool exhausted: " +
                        std::to_string(config.simple_count) +
                        " simple entries requested, capacity " +
                        std::to_string(simple_pool.size() + 1));
  }
  if (config.complex_count > static_cast<int>(complex_pool.size())) {
    throw CapacityError("template pool exhausted: " +
                        std::to_string(config.complex_count) +
                        " complex entries requested, capacity " +
                        std::to_string(complex_pool.size()));
  }

  auto base_name = [&](const std::string& pid) {
    return pid.substr(0, pid.find('_'));
  };

  QuestionBank out;
  out.entries.reserve(config.total_count);
  if (with_fixture) {
    out.entries.push_back(instantiate(*fixture_template, "Apple_1", "Apple",
                                      "fixture-apple-1", db));
  }
  for (int i = 0; i < simple_needed; ++i) {
    const auto& [t, p] = simple_pool[i];
    char id[16];
    std::snprintf(id, sizeof(id), "s-%04d", i + 1);
    out.entries.push_back(instantiate(*t, p, base_name(p), id, db));
  }
  for (int i = 0; i < config.complex_count; ++i) {
    const auto& [t, p] = complex_pool[i];
    char id[16];
    std::snprintf(id, sizeof(id), "c-%04d", i + 1);
    out.entries.push_back(instantiate(*t, p, base_name(p), id, db));
  }
  return out;
}

ValidationOutcome validate_entry(const QuestionBankEntry& entry,
                                 const oracle::FixtureDb& db) {
  try {
    oracle::ResultTable result = db.execute(entry.reference_sql);
    if (oracle::results_match(result, entry.verified_result)) {
      return {true, ""};
    }
    return {false, "result mismatch: got " + oracle::result_to_string(result) +
                       ", expected " +
                       oracle::result_to_string(entry.verified_result)};
  } catch (const SqlError& e) {
    return {false, e.what()};
  }
}

// ---------------------------------------------------------------------------
// Paraphrasing and eval set construction
// ---------------------------------------------------------------------------

namespace {

// Case-insensitive find; returns npos when absent.
std::string::size_type ifind(const std::string& haystack,
                             const std::string& needle) {
  if (needle.empty() || haystack.size() < needle.size()) {
    return std::string::npos;
  }
  auto lc = [](char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  };
  for (std::string::size_type i = 0;
       i + needle.size() <= haystack.size(); ++i) {
    bool hit = true;
    for (std::string::size_type j = 0; j < needle.size(); ++j) {
      if (lc(haystack[i + j]) != lc(needle[j])) {
        hit = false;
        break;
      }
    }
    if (hit) return i;
  }
  return std::string::npos;
}

void replace_all_ci(std::string& text, const std::string& from,
                    const std::string& to) {
  // Repeated scan from the start; phrases never expand into themselves.
  for (;;) {
    std::string::size_type at = ifind(text, from);
    if (at == std::string::npos) break;
    text.replace(at, from.size(), to);
  }
}

void capitalize_first(std::string& text) {
  for (char& c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return;
    }
  }
}

}  // namespace

Paraphraser default_paraphraser(const EntityCatalog& catalog) {
  Paraphraser p;
  p.synonyms = {
      {"what's", "could you tell me"},
      {"what is", "could you tell me"},
      {"in the last week", "over the last 7 days"},
      {"how many", "what is the number of"},
      {"how much", "what amount of"},
      {"across all sites", "over every site"},
      {"ordered", "purchased"},
  };
  p.entity_pool = catalog.product_ids();
  return p;
}

EvalSet build_eval_set(const QuestionBank& bank, const Paraphraser& paraphraser,
                       const oracle::FixtureDb& db,
                       const EntityCatalog& catalog, std::uint64_t seed,
                       int cases_per_entry) {
  if (cases_per_entry < 1) {
    throw ContractError("build_eval_set: cases_per_entry must be >= 1");
  }
  EvalSet out;
  for (const auto& entry : bank.entries) {
    for (int round = 0; round < cases_per_entry; ++round) {
      KeyedRng rng(seed, entry.id + "#" + std::to_string(round), "paraphrase");
      EvalCase c;
      c.source_entry_id = entry.id;
      c.question = entry.question;
      c.ground_truth_sql = entry.reference_sql;

      for (const auto& rule : paraphraser.synonyms) {
        if (rng.next_double() < paraphraser.apply_probability) {
          replace_all_ci(c.question, rule.from, rule.to);
        }
      }
      capitalize_first(c.question);

      // Entity resampling: swap the product entity for another pool member.
      const ContextEntity* product_entity = nullptr;
      for (const auto& ce : entry.context) {
        if (ce.table == "product" && !ce.id.empty()) {
          product_entity = &ce;
          break;
        }
      }
      bool skip = false;
      if (product_entity && !paraphraser.entity_pool.empty() &&
          rng.next_double() < paraphraser.entity_swap_probability) {
        std::vector<std::string> candidates;
        for (const auto& pid : paraphraser.entity_pool) {
          if (pid != product_entity->id) candidates.push_back(pid);
        }
        if (!candidates.empty()) {
          const std::string& substitute =
              candidates[rng.next_below(candidates.size())];
          if (!catalog.find_id(substitute)) {
            out.skipped.push_back("entry " + entry.id + " round " +
                                  std::to_string(round) +
                                  ": substituted entity '" + substitute +
                                  "' not present in the fixture database");
            skip = true;
          } else {
            replace_all_ci(c.question, product_entity->id, substitute);
            replace_all_ci(c.ground_truth_sql, product_entity->id, substitute);
            c.entity_map[product_entity->id] = substitute;
          }
        }
      }
      if (skip) continue;
      c.ground_truth_result = db.execute(c.ground_truth_sql);
      out.cases.push_back(std::move(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence (line-delimited JSON)
// ---------------------------------------------------------------------------

namespace {

json entry_to_json(const QuestionBankEntry& e) {
  json context = json::array();
  for (const auto& ce : e.context) {
    json jc;
    if (!ce.table.empty()) jc["table"] = ce.table;
    if (!ce.id.empty()) jc["id"] = ce.id;
    if (!ce.description.empty()) jc["description"] = ce.description;
    if (!ce.topic.empty()) jc["topic"] = ce.topic;
    context.push_back(jc);
  }
  return {{"id", e.id},
          {"question", e.question},
          {"context", context},
          {"reasoning", e.reasoning},
          {"reference_sql", e.reference_sql},
          {"verified_result", oracle::result_to_json(e.verified_result)},
          {"complexity", to_string(e.complexity)}};
}

QuestionBankEntry entry_from_json(const json& j) {
  QuestionBankEntry e;
  e.id = j.at("id").get<std::string>();
  e.question = j.at("question").get<std::string>();
  for (const auto& jc : j.at("context")) {
    ContextEntity ce;
    ce.table = jc.value("table", "");
    ce.id = jc.value("id", "");
    ce.description = jc.value("description", "");
    ce.topic = jc.value("topic", "");
    if ((ce.table.empty() || ce.id.empty()) && ce.topic.empty()) {
      throw ParseError("context entity needs table+id or topic");
    }
    e.context.push_back(ce);
  }
  e.reasoning = j.at("reasoning").get<std::string>();
  e.reference_sql = j.at("reference_sql").get<std::string>();
  e.verified_result = oracle::result_from_json(j.at("verified_result"));
  e.complexity = complexity_from_string(j.at("complexity").get<std::string>());
  return e;
}

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line_no);
    }
  }
}

}  // namespace

void save_bank(const QuestionBank& bank, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& e : bank.entries) {
    out << entry_to_json(e).dump() << "\n";
  }
}

QuestionBank load_bank(const std::string& path) {
  QuestionBank bank;
  for_each_line(path,
                [&](const json& j) { bank.entries.push_back(entry_from_json(j)); });
  return bank;
}

void save_eval_set(const EvalSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& c : set.cases) {
    json j = {{"source_entry_id", c.source_entry_id},
              {"question", c.question},
              {"entity_map", c.entity_map},
              {"ground_truth_sql", c.ground_truth_sql},
              {"ground_truth_result",
               oracle::result_to_json(c.ground_truth_result)}};
    out << j.dump() << "\n";
  }
}

EvalSet load_eval_set(const std::string& path) {
  EvalSet set;
  for_each_line(path, [&](const json& j) {
    EvalCase c;
    c.source_entry_id = j.at("source_entry_id").get<std::string>();
    c.question = j.at("question").get<std::string>();
    c.entity_map =
        j.at("entity_map").get<std::map<std::string, std::string>>();
    c.ground_truth_sql = j.at("ground_truth_sql").get<std::string>();
    c.ground_truth_result = oracle::result_from_json(j.at("ground_truth_result"));
    set.cases.push_back(std::move(c));
  });
  return set;
}

}  // namespace sqlconf::bank
