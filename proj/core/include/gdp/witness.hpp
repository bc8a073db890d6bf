#pragma once

#include <map>
#include <string>
#include <vector>

#include "gdp/query.hpp"
#include "gdp/relation.hpp"

namespace gdp {

/// A witness is a valuation of all rule variables satisfied by the database.
/// `tuples` holds the distinct input tuples used (a self-join may fill
/// several atoms with the same tuple, which is stored once).
struct Witness {
  int rule_index = 0;
  std::vector<Value> valuation;  // rule.var_order order, head prefix first
  std::vector<TupleRef> tuples;  // sorted, deduplicated

  bool operator==(const Witness&) const = default;
};

/// Bidirectional tuple <-> witness <-> view-tuple maps for one view.
struct ProvenanceIndex {
  std::string view_label;
  std::vector<Witness> witnesses;                // sorted by (rule_index, valuation)
  std::vector<std::vector<Value>> view_tuples;   // sorted distinct head projections
  std::vector<int> witness_view;                 // witness id -> view tuple id
  std::vector<std::vector<int>> view_witnesses;  // view tuple id -> witness ids
  std::map<TupleRef, std::vector<int>> tuple_witnesses;

  int view_tuple_id(const std::vector<Value>& values) const;  // -1 when absent
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates the full version of q over db: witnesses are all satisfied
/// valuations per rule, view tuples their head projections deduplicated
/// across rules. Multiplicities never multiply witnesses.
ProvenanceIndex enumerate_witnesses(const Database& db, const Query& q,
                                    const std::string& view_label = "");

/// Number of distinct output tuples of q over db.
std::size_t evaluate_count(const Database& db, const Query& q);

/// |q(db)| - |q(db \ gamma)|.
std::size_t delta_count(const Database& db, const Query& q, const std::vector<TupleRef>& gamma);

std::string provenance_to_json(const ProvenanceIndex& prov);

}  // namespace gdp
