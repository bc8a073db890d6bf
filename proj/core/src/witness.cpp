#include "gdp/witness.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"

namespace gdp {

int ProvenanceIndex::view_tuple_id(const std::vector<Value>& values) const {
  auto it = std::lower_bound(view_tuples.begin(), view_tuples.end(), values);
  if (it == view_tuples.end() || *it != values) return -1;
  return static_cast<int>(it - view_tuples.begin());
}

namespace {

using WitnessSink =
    std::function<void(int, const std::vector<Value>&, const std::vector<TupleRef>&)>;

// Hash index over one relation keyed by a subset of positions, built lazily
// per (relation, position set) and cached for the whole evaluation.
struct PositionIndex {
  std::map<std::vector<Value>, std::vector<const std::vector<Value>*>> buckets;
};

// Left-to-right atom-at-a-time join. Constants and already-bound variables
// are filtered through the position indexes first.
class Evaluator {
 public:
  Evaluator(const Database& db, const Query& q) : db_(db), q_(q) {
    for (const auto& rule : q.rules)
      for (const auto& atom : rule.body) {
        const Relation* rel = db.find(atom.relation);
        if (!rel)
          throw EvalError("query '" + q.name + "' references unknown relation '" + atom.relation +
                          "'");
        if (rel->arity != atom.terms.size())
          throw EvalError("atom " + atom.relation + "/" + std::to_string(atom.terms.size()) +
                          " does not match relation arity " + std::to_string(rel->arity));
      }
  }

  void run(const WitnessSink& sink) {
    sink_ = &sink;
    for (std::size_t ri = 0; ri < q_.rules.size(); ++ri) {
      const Rule& rule = q_.rules[ri];
      var_slot_.clear();
      for (std::size_t i = 0; i < rule.var_order.size(); ++i) var_slot_[rule.var_order[i]] = i;
      valuation_.assign(rule.var_order.size(), Value{});
      bound_.assign(rule.var_order.size(), false);
      used_.assign(rule.body.size(), TupleRef{});
      rule_index_ = static_cast<int>(ri);
      extend(rule, 0);
    }
    sink_ = nullptr;
  }

 private:
  void emit() {
    std::vector<TupleRef> tuples(used_.begin(), used_.end());
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    (*sink_)(rule_index_, valuation_, tuples);
  }

  void try_row(const Rule& rule, std::size_t atom_idx, const std::vector<Value>& row) {
    const Atom& atom = rule.body[atom_idx];
    std::vector<std::size_t> newly;
    bool ok = true;
    for (std::size_t p = 0; p < atom.terms.size() && ok; ++p) {
      const Term& t = atom.terms[p];
      if (!t.is_var) {
        ok = row[p] == t.constant;
      } else {
        std::size_t slot = var_slot_.at(t.var);
        if (bound_[slot]) {
          ok = row[p] == valuation_[slot];
        } else {
          valuation_[slot] = row[p];
          bound_[slot] = true;
          newly.push_back(slot);
        }
      }
    }
    if (ok) {
      used_[atom_idx] = TupleRef{atom.relation, row};
      if (atom_idx + 1 == rule.body.size())
        emit();
      else
        extend(rule, atom_idx + 1);
    }
    for (std::size_t slot : newly) bound_[slot] = false;
  }

  void extend(const Rule& rule, std::size_t atom_idx) {
    const Atom& atom = rule.body[atom_idx];
    const Relation& rel = db_.at(atom.relation);

    std::vector<std::size_t> fixed;
    std::vector<Value> key;
    for (std::size_t p = 0; p < atom.terms.size(); ++p) {
      const Term& t = atom.terms[p];
      if (!t.is_var) {
        fixed.push_back(p);
        key.push_back(t.constant);
      } else if (bound_[var_slot_.at(t.var)]) {
        fixed.push_back(p);
        key.push_back(valuation_[var_slot_.at(t.var)]);
      }
    }

    if (fixed.size() == atom.terms.size()) {
      auto it = rel.rows.find(key);
      if (it != rel.rows.end()) try_row(rule, atom_idx, it->first);
      return;
    }
    if (fixed.empty()) {
      for (const auto& [row, mult] : rel.rows) try_row(rule, atom_idx, row);
      return;
    }
    const PositionIndex& idx = index_for(rel, fixed);
    auto it = idx.buckets.find(key);
    if (it == idx.buckets.end()) return;
    for (const auto* row : it->second) try_row(rule, atom_idx, *row);
  }

  const PositionIndex& index_for(const Relation& rel, const std::vector<std::size_t>& positions) {
    auto key = std::make_pair(rel.name, positions);
    auto it = indexes_.find(key);
    if (it != indexes_.end()) return it->second;
    PositionIndex idx;
    for (const auto& [row, mult] : rel.rows) {
      std::vector<Value> k;
      k.reserve(positions.size());
      for (std::size_t p : positions) k.push_back(row[p]);
      idx.buckets[std::move(k)].push_back(&row);
    }
    return indexes_.emplace(std::move(key), std::move(idx)).first->second;
  }

  const Database& db_;
  const Query& q_;
  std::map<std::string, std::size_t> var_slot_;
  std::vector<Value> valuation_;
  std::vector<bool> bound_;
  std::vector<TupleRef> used_;
  std::map<std::pair<std::string, std::vector<std::size_t>>, PositionIndex> indexes_;
  int rule_index_ = 0;
  const WitnessSink* sink_ = nullptr;
};

}  // namespace

ProvenanceIndex enumerate_witnesses(const Database& db, const Query& q,
                                    const std::string& view_label) {
  Evaluator ev(db, q);
  ProvenanceIndex prov;
  prov.view_label = view_label;

  std::vector<Witness> raw;
  ev.run([&](int ri, const std::vector<Value>& valuation, const std::vector<TupleRef>& tuples) {
    raw.push_back(Witness{ri, valuation, tuples});
  });
  std::sort(raw.begin(), raw.end(), [](const Witness& a, const Witness& b) {
    if (a.rule_index != b.rule_index) return a.rule_index < b.rule_index;
    return a.valuation < b.valuation;
  });
  prov.witnesses = std::move(raw);

  std::set<std::vector<Value>> views;
  for (const auto& w : prov.witnesses) {
    std::size_t head = q.rules[w.rule_index].head_vars.size();
    views.insert(std::vector<Value>(w.valuation.begin(), w.valuation.begin() + head));
  }
  prov.view_tuples.assign(views.begin(), views.end());

  prov.witness_view.resize(prov.witnesses.size());
  prov.view_witnesses.assign(prov.view_tuples.size(), {});
  for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
    const Witness& w = prov.witnesses[wi];
    std::size_t head = q.rules[w.rule_index].head_vars.size();
    std::vector<Value> proj(w.valuation.begin(), w.valuation.begin() + head);
    int vid = prov.view_tuple_id(proj);
    prov.witness_view[wi] = vid;
    prov.view_witnesses[vid].push_back(static_cast<int>(wi));
    for (const auto& t : w.tuples) prov.tuple_witnesses[t].push_back(static_cast<int>(wi));
  }
  return prov;
}

std::size_t evaluate_count(const Database& db, const Query& q) {
  Evaluator ev(db, q);
  std::set<std::vector<Value>> views;
  ev.run([&](int ri, const std::vector<Value>& valuation, const std::vector<TupleRef>&) {
    std::size_t head = q.rules[ri].head_vars.size();
    views.insert(std::vector<Value>(valuation.begin(), valuation.begin() + head));
  });
  return views.size();
}

std::size_t delta_count(const Database& db, const Query& q, const std::vector<TupleRef>& gamma) {
  std::size_t before = evaluate_count(db, q);
  std::size_t after = evaluate_count(delete_tuples(db, gamma), q);
  return before - after;
}

std::string provenance_to_json(const ProvenanceIndex& prov) {
  nlohmann::json j;
  auto value_json = [](const Value& v) -> nlohmann::json {
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    return std::get<std::string>(v);
  };
  j["view"] = prov.view_label;
  j["view_tuples"] = nlohmann::json::array();
  for (const auto& vt : prov.view_tuples) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& v : vt) row.push_back(value_json(v));
    j["view_tuples"].push_back(row);
  }
  j["witnesses"] = nlohmann::json::array();
  for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
    const auto& w = prov.witnesses[wi];
    nlohmann::json wj;
    wj["rule"] = w.rule_index;
    wj["view_tuple"] = prov.witness_view[wi];
    wj["valuation"] = nlohmann::json::array();
    for (const auto& v : w.valuation) wj["valuation"].push_back(value_json(v));
    wj["tuples"] = nlohmann::json::array();
    for (const auto& t : w.tuples) {
      nlohmann::json tj;
      tj["relation"] = t.relation;
      tj["values"] = nlohmann::json::array();
      for (const auto& v : t.values) tj["values"].push_back(value_json(v));
      wj["tuples"].push_back(tj);
    }
    j["witnesses"].push_back(wj);
  }
  return j.dump(2);
}

}  // namespace gdp
