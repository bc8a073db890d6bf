#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdp/generator.hpp"
#include "gdp/instance.hpp"
#include "gdp/oracle.hpp"
#include "gdp/solver.hpp"
#include "gdp/witness.hpp"

namespace testutil {

using namespace gdp;

inline Value V(std::int64_t v) { return Value{v}; }
inline Value V(const char* s) { return Value{std::string(s)}; }

inline TupleRef T(const std::string& rel, std::vector<Value> vs) {
  return TupleRef{rel, std::move(vs)};
}

struct RowSpec {
  std::string relation;
  std::vector<Value> values;
  std::int64_t count = 1;
};

inline Database make_db(Semantics semantics, const std::vector<RowSpec>& rows) {
  Database db;
  db.semantics = semantics;
  for (const auto& r : rows) {
    Relation* rel = nullptr;
    for (auto& existing : db.relations)
      if (existing.name == r.relation) rel = &existing;
    if (!rel) {
      db.relations.push_back(Relation{r.relation, r.values.size(), {}});
      rel = &db.relations.back();
    }
    rel->rows[r.values] += semantics == Semantics::Bag ? r.count : 0;
    if (semantics == Semantics::Set) rel->rows[r.values] = 1;
  }
  return db;
}

// The two-rule example database used throughout: R(1,1), R(1,2), S(1).
inline Database tiny_swp_db() {
  return make_db(Semantics::Set, {{"R", {V(1), V(1)}}, {"R", {V(1), V(2)}}, {"S", {V(1)}}});
}

inline Query tiny_swp_query() { return parse_query("Qp(x) :- R(x,y), S(x)."); }

// Database from the chain-query walkthrough: R(1,2), R(2,2), S(2,3).
inline Database chain_example_db() {
  return make_db(Semantics::Set,
                 {{"R", {V(1), V(2)}}, {"R", {V(2), V(2)}}, {"S", {V(2), V(3)}}});
}

// ---- direct definitions of the classical variants (test-only oracles) ----

inline std::vector<std::vector<TupleRef>> all_subsets(const Database& db) {
  std::vector<TupleRef> tuples = db.all_tuples();
  std::vector<std::vector<TupleRef>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << tuples.size()); ++mask) {
    std::vector<TupleRef> gamma;
    for (std::size_t b = 0; b < tuples.size(); ++b)
      if (mask & (std::uint64_t{1} << b)) gamma.push_back(tuples[b]);
    out.push_back(std::move(gamma));
  }
  return out;
}

inline std::int64_t source_cost(const Database& db, const std::vector<TupleRef>& gamma) {
  std::int64_t c = 0;
  for (const auto& t : gamma) c += tuple_weight(db, t);
  return c;
}

// min sum of weights s.t. target leaves the view
inline std::optional<std::int64_t> direct_dpss(const Database& db, const Query& q,
                                               const std::vector<Value>& target) {
  Query bound = bind_head(q, target);
  std::optional<std::int64_t> best;
  for (const auto& gamma : all_subsets(db)) {
    if (evaluate_count(delete_tuples(db, gamma), bound) != 0) continue;
    std::int64_t c = source_cost(db, gamma);
    if (!best || c < *best) best = c;
  }
  return best;
}

// min deleted view tuples s.t. target leaves the view
inline std::optional<std::int64_t> direct_dpvs(const Database& db, const Query& q,
                                               const std::vector<Value>& target) {
  Query bound = bind_head(q, target);
  auto before = static_cast<std::int64_t>(evaluate_count(db, q));
  std::optional<std::int64_t> best;
  for (const auto& gamma : all_subsets(db)) {
    Database rest = delete_tuples(db, gamma);
    if (evaluate_count(rest, bound) != 0) continue;
    std::int64_t c = before - static_cast<std::int64_t>(evaluate_count(rest, q));
    if (!best || c < *best) best = c;
  }
  return best;
}

// min weights s.t. at least k view tuples are deleted
inline std::optional<std::int64_t> direct_adpss(const Database& db, const Query& q,
                                                std::int64_t k) {
  auto before = static_cast<std::int64_t>(evaluate_count(db, q));
  std::optional<std::int64_t> best;
  for (const auto& gamma : all_subsets(db)) {
    auto after = static_cast<std::int64_t>(evaluate_count(delete_tuples(db, gamma), q));
    if (before - after < k) continue;
    std::int64_t c = source_cost(db, gamma);
    if (!best || c < *best) best = c;
  }
  return best;
}

// max deleted weight s.t. the view is fully preserved (reported negated)
inline std::int64_t direct_swp(const Database& db, const Query& q) {
  auto before = evaluate_count(db, q);
  std::int64_t best = 0;
  for (const auto& gamma : all_subsets(db)) {
    if (evaluate_count(delete_tuples(db, gamma), q) != before) continue;
    best = std::max(best, source_cost(db, gamma));
  }
  return -best;
}

// ---- random generators (seeded, deterministic) ----

struct TestRng {
  std::mt19937_64 engine;
  explicit TestRng(std::uint64_t seed) : engine(seed) {}
  std::int64_t upto(std::int64_t n) {  // in [0, n)
    return static_cast<std::int64_t>(engine() % static_cast<std::uint64_t>(n));
  }
  std::int64_t in(std::int64_t lo, std::int64_t hi) { return lo + upto(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(engine() >> 11) / 9007199254740992.0 < p; }
};

// small random database for the relations of q
inline Database random_db_for(const Query& q, std::size_t n_tuples, Semantics semantics,
                              std::int64_t domain, std::uint64_t seed) {
  GenProfile profile{q, n_tuples, domain, semantics, 3, seed};
  return gen_random(profile);
}

// random self-join-free CQ over fresh relation names
inline Query random_sjfree_query(TestRng& rng) {
  int natoms = static_cast<int>(rng.in(1, 4));
  int nvars = static_cast<int>(rng.in(1, 5));
  std::vector<std::string> vars;
  for (int i = 0; i < nvars; ++i) vars.push_back("v" + std::to_string(i));
  std::string text;
  std::vector<std::string> used;
  for (int a = 0; a < natoms; ++a) {
    int arity = static_cast<int>(rng.in(1, 3));
    std::string atom = std::string(1, static_cast<char>('A' + a)) + "(";
    for (int p = 0; p < arity; ++p) {
      if (p) atom += ",";
      const std::string& v = vars[rng.upto(nvars)];
      atom += v;
      used.push_back(v);
    }
    atom += ")";
    text += (a ? ", " : "") + atom;
  }
  // head: random subset of used variables
  std::vector<std::string> head;
  for (const auto& v : vars) {
    bool occurs = std::find(used.begin(), used.end(), v) != used.end();
    if (occurs && rng.chance(0.4)) head.push_back(v);
  }
  std::string head_text;
  for (std::size_t i = 0; i < head.size(); ++i) head_text += (i ? "," : "") + head[i];
  return parse_query("Q(" + head_text + ") :- " + text + ".");
}

// ---- exhaustive 0/1 reference for arbitrary models ----

struct ExhaustiveResult {
  bool feasible = false;
  std::int64_t optimum = 0;
};

inline ExhaustiveResult exhaustive_binary_optimum(const IlpModel& model) {
  std::size_t n = model.variables.size();
  ExhaustiveResult out;
  std::vector<int> x(n, 0);
  // incremental constraint activities over Gray-code flips
  std::vector<std::int64_t> act(model.constraints.size(), 0);
  std::vector<std::vector<std::pair<int, std::int64_t>>> var_rows(n);
  for (std::size_t ci = 0; ci < model.constraints.size(); ++ci)
    for (const auto& [var, coeff] : model.constraints[ci].terms)
      var_rows[var].emplace_back(static_cast<int>(ci), coeff);
  std::int64_t obj = 0;

  auto check = [&]() {
    for (std::size_t ci = 0; ci < model.constraints.size(); ++ci) {
      const auto& c = model.constraints[ci];
      if (c.sense == Sense::Le && act[ci] > c.rhs) return false;
      if (c.sense == Sense::Ge && act[ci] < c.rhs) return false;
      if (c.sense == Sense::Eq && act[ci] != c.rhs) return false;
    }
    return true;
  };
  auto consider = [&]() {
    if (!check()) return;
    if (!out.feasible || obj < out.optimum) {
      out.feasible = true;
      out.optimum = obj;
    }
  };

  consider();
  std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    unsigned long bit = static_cast<unsigned long>(__builtin_ctzll(i));  // Gray-code flip
    int delta = x[bit] ? -1 : 1;
    x[bit] ^= 1;
    obj += delta * model.variables[bit].objective;
    for (const auto& [row, coeff] : var_rows[bit]) act[row] += delta * coeff;
    consider();
  }
  return out;
}

// random small model over binary variables
inline IlpModel random_model(TestRng& rng, int max_vars = 14) {
  IlpModel model;
  model.mode = BuildMode::Naive;
  int n = static_cast<int>(rng.in(1, max_vars));
  for (int j = 0; j < n; ++j) {
    VarInfo v;
    v.id = VarId{VarKind::Tuple, -1, j};
    v.objective = rng.in(-5, 5);
    model.variables.push_back(v);
    model.tuple_table.push_back(TupleRef{"X", {Value{static_cast<std::int64_t>(j)}}});
  }
  int m = static_cast<int>(rng.in(0, 8));
  for (int i = 0; i < m; ++i) {
    LinearConstraint c;
    for (int j = 0; j < n; ++j)
      if (rng.chance(0.5)) {
        std::int64_t a = rng.in(-3, 3);
        if (a != 0) c.terms.emplace_back(j, a);
      }
    int s = static_cast<int>(rng.in(0, 2));
    c.sense = s == 0 ? Sense::Le : (s == 1 ? Sense::Ge : Sense::Eq);
    c.rhs = rng.in(-4, 4);
    c.tag = ConstraintTag::UcDel;
    model.constraints.push_back(std::move(c));
  }
  return model;
}

// random small GDP instance over one of the benchmark queries
struct RandomInstance {
  GdpInstance instance;
  std::string description;
};

inline RandomInstance random_gdp_instance(TestRng& rng, const Query& q, Semantics semantics,
                                          std::uint64_t seed) {
  std::size_t n = static_cast<std::size_t>(rng.in(3, 9));
  std::int64_t domain = rng.in(2, 4);
  Database db = [&] {
    for (;; domain += 1) {
      try {
        return random_db_for(q, n, semantics, domain, seed);
      } catch (const IngestError&) {
        // domain too small for the requested draw, widen it
      }
    }
  }();

  int kind = static_cast<int>(rng.in(0, 5));
  switch (kind) {
    case 0: {  // source side effects on a random target
      ProvenanceIndex prov = enumerate_witnesses(db, q);
      if (!prov.view_tuples.empty()) {
        auto target = prov.view_tuples[rng.upto(static_cast<std::int64_t>(prov.view_tuples.size()))];
        return {make_dpss(db, q, target), "dpss"};
      }
      break;
    }
    case 1: {  // view side effects
      ProvenanceIndex prov = enumerate_witnesses(db, q);
      if (!prov.view_tuples.empty()) {
        auto target = prov.view_tuples[rng.upto(static_cast<std::int64_t>(prov.view_tuples.size()))];
        return {make_dpvs(db, q, target), "dpvs"};
      }
      break;
    }
    case 2: {  // aggregated deletion
      auto view = static_cast<std::int64_t>(evaluate_count(db, q));
      if (view > 0) return {make_adpss(db, q, rng.in(1, view)), "adpss"};
      break;
    }
    case 3:
      return {make_swp(db, q), "swp"};
    case 4: {  // resilience of the existential query
      Query qe = q.is_boolean() ? q : existential_query(q);
      if (evaluate_count(db, qe) > 0) return {make_resilience(db, qe), "res"};
      break;
    }
    case 5: {  // generic mixed instance: pres part of the view + identity min
      GdpInstance inst;
      inst.db = db;
      auto view = static_cast<std::int64_t>(evaluate_count(db, q));
      if (view > 0) {
        inst.pres_views.push_back(ViewDef{q, rng.in(0, view), false});
        for (auto& iq : identity_queries(db)) inst.min_views.push_back(ViewDef{iq, 0, true});
        inst.max_views.push_back(ViewDef{q, 0, false});
        inst.subject_query = q;
        return {std::move(inst), "generic"};
      }
      break;
    }
  }
  return {make_swp(db, q), "swp-fallback"};
}

}  // namespace testutil
