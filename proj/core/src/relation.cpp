#include "gdp/relation.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gdp {

std::string value_to_string(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  return std::get<std::string>(v);
}

Value parse_value(const std::string& token) {
  if (token.empty()) return token;
  std::size_t i = (token[0] == '-' || token[0] == '+') ? 1 : 0;
  if (i == token.size()) return token;
  for (std::size_t j = i; j < token.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(token[j]))) return token;
  try {
    return static_cast<std::int64_t>(std::stoll(token));
  } catch (const std::out_of_range&) {
    return token;  // too large for int64, keep as string
  }
}

std::string values_to_string(const std::vector<Value>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += value_to_string(vs[i]);
  }
  return out + ")";
}

std::string semantics_name(Semantics s) { return s == Semantics::Set ? "set" : "bag"; }

Semantics parse_semantics(const std::string& s) {
  if (s == "set") return Semantics::Set;
  if (s == "bag") return Semantics::Bag;
  throw IngestError("unknown semantics '" + s + "' (expected 'set' or 'bag')");
}

std::string TupleRef::str() const { return relation + values_to_string(values); }

const Relation* Database::find(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return &r;
  return nullptr;
}

const Relation& Database::at(const std::string& name) const {
  const Relation* r = find(name);
  if (!r) throw IngestError("unknown relation '" + name + "'");
  return *r;
}

bool Database::contains(const TupleRef& t) const {
  const Relation* r = find(t.relation);
  return r && r->contains(t.values);
}

std::size_t Database::distinct_size() const {
  std::size_t n = 0;
  for (const auto& r : relations) n += r.rows.size();
  return n;
}

std::vector<TupleRef> Database::all_tuples() const {
  std::vector<TupleRef> out;
  out.reserve(distinct_size());
  for (const auto& r : relations)
    for (const auto& [row, mult] : r.rows) out.push_back(TupleRef{r.name, row});
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    std::size_t b = f.find_first_not_of(" \t");
    std::size_t e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

Relation load_relation_csv(const fs::path& file, const std::string& name, std::size_t arity,
                           bool count_column, bool skip_header, Semantics semantics) {
  std::ifstream in(file);
  if (!in) throw IngestError("cannot open CSV file '" + file.string() + "'");
  Relation rel;
  rel.name = name;
  rel.arity = arity;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_header && lineno == 1) continue;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    std::size_t expected = arity + (count_column ? 1 : 0);
    if (fields.size() != expected)
      throw IngestError(file.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(expected) + " columns for relation '" + name + "', got " +
                        std::to_string(fields.size()));
    std::vector<Value> row;
    row.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) row.push_back(parse_value(fields[i]));
    std::int64_t count = 1;
    if (count_column) {
      Value cv = parse_value(fields[arity]);
      if (!std::holds_alternative<std::int64_t>(cv))
        throw IngestError(file.string() + ":" + std::to_string(lineno) +
                          ": count column is not an integer");
      count = std::get<std::int64_t>(cv);
      if (count < 1)
        throw IngestError(file.string() + ":" + std::to_string(lineno) +
                          ": count column must be >= 1, got " + std::to_string(count));
      if (semantics == Semantics::Set && count != 1)
        throw IngestError(file.string() + ":" + std::to_string(lineno) +
                          ": count != 1 under set semantics");
    }
    auto [it, inserted] = rel.rows.emplace(std::move(row), count);
    if (!inserted) {
      if (semantics == Semantics::Bag)
        it->second += count;
      // set semantics: duplicates collapse to multiplicity 1
    }
  }
  return rel;
}

}  // namespace

Database load_database(const std::string& manifest_path, const LoadOptions& opts) {
  std::ifstream in(manifest_path);
  if (!in) throw IngestError("cannot open manifest '" + manifest_path + "'");
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw IngestError("manifest '" + manifest_path + "': " + e.what());
  }
  Database db;
  db.semantics = parse_semantics(m.value("semantics", "set"));
  fs::path base = fs::path(manifest_path).parent_path();
  std::set<std::string> names;
  for (const auto& r : m.at("relations")) {
    std::string name = r.at("name").get<std::string>();
    if (!names.insert(name).second)
      throw IngestError("duplicate relation '" + name + "' in manifest");
    auto arity = r.at("arity").get<std::size_t>();
    if (arity == 0) throw IngestError("relation '" + name + "' has arity 0");
    fs::path file = base / r.at("file").get<std::string>();
    bool count_column = r.value("count_column", false);
    bool header = r.value("header", false) || opts.force_header;
    db.relations.push_back(
        load_relation_csv(file, name, arity, count_column, header, db.semantics));
  }
  return db;
}

std::string save_database(const Database& db, const std::string& dir,
                          const std::string& manifest_name) {
  fs::create_directories(dir);
  json m;
  m["semantics"] = semantics_name(db.semantics);
  m["relations"] = json::array();
  for (const auto& rel : db.relations) {
    bool counts = db.semantics == Semantics::Bag;
    std::string file = rel.name + ".csv";
    std::ofstream out(fs::path(dir) / file);
    if (!out) throw IngestError("cannot write CSV for relation '" + rel.name + "'");
    for (const auto& [row, mult] : rel.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << value_to_string(row[i]);
      }
      if (counts) out << ',' << mult;
      out << '\n';
    }
    m["relations"].push_back(
        {{"name", rel.name}, {"arity", rel.arity}, {"file", file}, {"count_column", counts}});
  }
  fs::path mpath = fs::path(dir) / manifest_name;
  std::ofstream mo(mpath);
  mo << m.dump(2) << '\n';
  return mpath.string();
}

Database delete_tuples(const Database& db, const std::vector<TupleRef>& gamma) {
  Database out = db;
  std::set<TupleRef> seen;
  for (const auto& t : gamma) {
    if (!seen.insert(t).second) continue;
    bool erased = false;
    for (auto& rel : out.relations) {
      if (rel.name != t.relation) continue;
      erased = rel.rows.erase(t.values) > 0;
      break;
    }
    if (!erased) throw IngestError("cannot delete absent tuple " + t.str());
  }
  return out;
}

std::int64_t tuple_weight(const Database& db, const TupleRef& t) {
  const Relation* r = db.find(t.relation);
  if (!r) throw IngestError("unknown relation '" + t.relation + "'");
  auto it = r->rows.find(t.values);
  if (it == r->rows.end()) throw IngestError("tuple not in database: " + t.str());
  return it->second;
}

}  // namespace gdp
