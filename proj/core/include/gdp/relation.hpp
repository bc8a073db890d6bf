#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gdp {

/// A constant is either a 64-bit integer or a string. Integers order before
/// strings; comparison is by value within a kind.
using Value = std::variant<std::int64_t, std::string>;

std::string value_to_string(const Value& v);

/// Tokens that parse as a decimal integer become integers, everything else is
/// kept as a string.
Value parse_value(const std::string& token);

std::string values_to_string(const std::vector<Value>& vs);

enum class Semantics { Set, Bag };

std::string semantics_name(Semantics s);
Semantics parse_semantics(const std::string& s);

/// Reference to one distinct tuple of a named relation.
struct TupleRef {
  std::string relation;
  std::vector<Value> values;

  auto operator<=>(const TupleRef&) const = default;
  std::string str() const;
};

struct Relation {
  std::string name;
  std::size_t arity = 0;
  // row -> multiplicity (>= 1; exactly 1 under set semantics)
  std::map<std::vector<Value>, std::int64_t> rows;

  bool operator==(const Relation&) const = default;
  bool contains(const std::vector<Value>& row) const { return rows.count(row) != 0; }
};

struct Database {
  Semantics semantics = Semantics::Set;
  std::vector<Relation> relations;  // manifest order

  bool operator==(const Database&) const = default;

  const Relation* find(const std::string& name) const;
  const Relation& at(const std::string& name) const;
  bool contains(const TupleRef& t) const;
  std::size_t distinct_size() const;

  /// All distinct tuples in canonical order: (relation name, values).
  std::vector<TupleRef> all_tuples() const;
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  bool force_header = false;  // skip the first CSV line of every relation
};

/// Loads a database from a JSON manifest:
///   {"semantics": "set"|"bag",
///    "relations": [{"name": "R", "arity": 2, "file": "r.csv",
///                   "count_column": false, "header": false}, ...]}
/// CSV files are comma separated with no header row by default; a trailing
/// multiplicity column is read when "count_column" is true.
Database load_database(const std::string& manifest_path, const LoadOptions& opts = {});

/// Writes manifest + one CSV per relation into `dir`. Bag databases get a
/// trailing count column. Loading the result yields an equal Database.
std::string save_database(const Database& db, const std::string& dir,
                          const std::string& manifest_name = "manifest.json");

/// Removes every tuple in gamma entirely (all copies). The input database is
/// unchanged; tuples absent from db raise IngestError.
Database delete_tuples(const Database& db, const std::vector<TupleRef>& gamma);

/// Multiplicity of t; always 1 under set semantics.
std::int64_t tuple_weight(const Database& db, const TupleRef& t);

}  // namespace gdp
