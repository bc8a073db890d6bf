#include <set>

#include "doctest.h"
#include "helpers.hpp"

using namespace gdp;
using namespace testutil;

namespace {

// exhaustive reference: try every combination of domain values for the
// rule's variables and keep the satisfied ones
std::set<std::pair<int, std::vector<Value>>> nested_loop_witnesses(const Database& db,
                                                                   const Query& q) {
  std::set<Value> domain;
  for (const auto& rel : db.relations)
    for (const auto& [row, mult] : rel.rows)
      for (const auto& v : row) domain.insert(v);
  std::vector<Value> values(domain.begin(), domain.end());

  std::set<std::pair<int, std::vector<Value>>> out;
  for (std::size_t ri = 0; ri < q.rules.size(); ++ri) {
    const Rule& rule = q.rules[ri];
    std::size_t nv = rule.var_order.size();
    if (nv > 0 && values.empty()) continue;  // no valuations over an empty domain
    std::vector<std::size_t> pick(nv, 0);
    while (true) {
      std::vector<Value> valuation(nv);
      for (std::size_t i = 0; i < nv; ++i) valuation[i] = values[pick[i]];
      bool sat = true;
      for (const auto& atom : rule.body) {
        std::vector<Value> row;
        for (const auto& term : atom.terms) {
          if (term.is_var) {
            std::size_t slot =
                std::find(rule.var_order.begin(), rule.var_order.end(), term.var) -
                rule.var_order.begin();
            row.push_back(valuation[slot]);
          } else {
            row.push_back(term.constant);
          }
        }
        if (!db.at(atom.relation).contains(row)) {
          sat = false;
          break;
        }
      }
      if (sat) out.insert({static_cast<int>(ri), valuation});
      std::size_t i = 0;
      for (; i < nv; ++i) {
        if (++pick[i] < values.size()) break;
        pick[i] = 0;
      }
      if (i == nv || nv == 0) break;
    }
    if (nv == 0) {  // boolean rule with all-constant atoms
      bool sat = true;
      for (const auto& atom : rule.body) {
        std::vector<Value> row;
        for (const auto& term : atom.terms) row.push_back(term.constant);
        if (!db.at(atom.relation).contains(row)) sat = false;
      }
      if (sat) out.insert({static_cast<int>(ri), {}});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("witnesses of the 2-chain walkthrough") {
  Database db = chain_example_db();
  Query q = builtin_query("chain2");
  ProvenanceIndex prov = enumerate_witnesses(db, q);
  REQUIRE(prov.witnesses.size() == 2);
  CHECK(prov.witnesses[0].valuation == std::vector<Value>{V(1), V(2), V(3)});
  CHECK(prov.witnesses[1].valuation == std::vector<Value>{V(2), V(2), V(3)});
  REQUIRE(prov.view_tuples.size() == 2);
  CHECK(prov.view_tuples[0] == std::vector<Value>{V(1)});
  CHECK(prov.view_tuples[1] == std::vector<Value>{V(2)});
  // both witnesses use the only S tuple
  auto it = prov.tuple_witnesses.find(T("S", {V(2), V(3)}));
  REQUIRE(it != prov.tuple_witnesses.end());
  CHECK(it->second.size() == 2);
}

TEST_CASE("witnesses of the small preservation example") {
  Database db = tiny_swp_db();
  ProvenanceIndex prov = enumerate_witnesses(db, tiny_swp_query());
  REQUIRE(prov.witnesses.size() == 2);
  CHECK(prov.witnesses[0].valuation == std::vector<Value>{V(1), V(1)});
  CHECK(prov.witnesses[1].valuation == std::vector<Value>{V(1), V(2)});
  REQUIRE(prov.view_tuples.size() == 1);
  CHECK(prov.view_tuples[0] == std::vector<Value>{V(1)});
  CHECK(prov.view_witnesses[0].size() == 2);
}

TEST_CASE("no witnesses over an empty database") {
  Database db = make_db(Semantics::Set, {});
  db.relations.push_back(Relation{"R", 2, {}});
  db.relations.push_back(Relation{"S", 2, {}});
  ProvenanceIndex prov = enumerate_witnesses(db, builtin_query("chain2"));
  CHECK(prov.witnesses.empty());
  CHECK(prov.view_tuples.empty());
  CHECK(evaluate_count(db, builtin_query("chain2")) == 0);
}

TEST_CASE("enumeration matches nested-loop evaluation") {
  TestRng rng(42);
  for (const char* name : {"chain2", "q3star", "q3star_sj", "triangle", "tri_chain_union"}) {
    Query q = builtin_query(name);
    for (int round = 0; round < 8; ++round) {
      Database db = random_db_for(q, static_cast<std::size_t>(rng.in(0, 10)),
                                  round % 2 ? Semantics::Bag : Semantics::Set, 3,
                                  static_cast<std::uint64_t>(round * 131 + 17));
      ProvenanceIndex prov = enumerate_witnesses(db, q);
      auto expected = nested_loop_witnesses(db, q);
      REQUIRE(prov.witnesses.size() == expected.size());
      for (const auto& w : prov.witnesses)
        CHECK(expected.count({w.rule_index, w.valuation}) == 1);
    }
  }
}

TEST_CASE("projection consistency and witness tuples") {
  Query q = builtin_query("q3star");
  Database db = random_db_for(q, 9, Semantics::Set, 3, 3);
  ProvenanceIndex prov = enumerate_witnesses(db, q);
  for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
    const Witness& w = prov.witnesses[wi];
    std::size_t head = q.rules[w.rule_index].head_vars.size();
    std::vector<Value> proj(w.valuation.begin(), w.valuation.begin() + head);
    CHECK(prov.view_tuples[prov.witness_view[wi]] == proj);
    for (const auto& t : w.tuples) CHECK(db.contains(t));
  }
}

TEST_CASE("self-joined witnesses store each tuple once") {
  // R(1,1) fills both atoms of the self-join chain rule
  Database db = make_db(Semantics::Bag, {{"R", {V(1), V(1), V(1)}, 2}});
  Query q = builtin_query("tri_chain_union");
  ProvenanceIndex prov = enumerate_witnesses(db, q);
  REQUIRE(!prov.witnesses.empty());
  for (const auto& w : prov.witnesses) {
    CHECK(w.tuples.size() == 1);
    CHECK(w.tuples[0] == T("R", {V(1), V(1), V(1)}));
  }
  // triangle rule and chain rule each produce a witness, same view tuple
  CHECK(prov.witnesses.size() == 2);
  CHECK(prov.view_tuples.size() == 1);
}

TEST_CASE("multiplicities never multiply witnesses") {
  Database bag = make_db(Semantics::Bag, {{"R", {V(1), V(2)}, 5}, {"S", {V(2), V(3)}, 4}});
  ProvenanceIndex prov = enumerate_witnesses(bag, builtin_query("chain2"));
  CHECK(prov.witnesses.size() == 1);
}

TEST_CASE("evaluate_count counts distinct view tuples") {
  CHECK(evaluate_count(chain_example_db(), builtin_query("chain2")) == 2);
  Database db = make_db(Semantics::Set, {{"R", {V(1), V(2)}}, {"S", {V(2), V(9)}},
                                         {"T", {V(9), V(1)}}});
  CHECK(evaluate_count(db, builtin_query("triangle")) == 1);  // boolean: the empty tuple
}

TEST_CASE("delta_count measures view deletions") {
  Database db = tiny_swp_db();
  Query q = tiny_swp_query();
  CHECK(delta_count(db, q, {T("R", {V(1), V(1)})}) == 0);  // witness (1,2) survives
  CHECK(delta_count(db, q, {}) == 0);
  CHECK(delta_count(db, q, {T("S", {V(1)})}) == 1);  // S(1) in every witness

  SUBCASE("monotone in gamma") {
    TestRng rng(5);
    Query chain = builtin_query("chain2");
    for (int round = 0; round < 20; ++round) {
      Database d = random_db_for(chain, 8, Semantics::Set, 3,
                                 static_cast<std::uint64_t>(round + 400));
      auto tuples = d.all_tuples();
      std::vector<TupleRef> g1, g2;
      for (const auto& t : tuples) {
        bool pick1 = rng.chance(0.3);
        if (pick1) g1.push_back(t);
        if (pick1 || rng.chance(0.3)) g2.push_back(t);
      }
      CHECK(delta_count(d, chain, g1) <= delta_count(d, chain, g2));
    }
  }
}

TEST_CASE("unknown relations and arity mismatches are errors") {
  Database db = chain_example_db();
  CHECK_THROWS_AS(enumerate_witnesses(db, parse_query("Q(x) :- Nope(x).")), EvalError);
  CHECK_THROWS_AS(enumerate_witnesses(db, parse_query("Q(x) :- R(x).")), EvalError);
}

TEST_CASE("provenance dumps to JSON") {
  std::string j = provenance_to_json(enumerate_witnesses(tiny_swp_db(), tiny_swp_query(), "pres0"));
  CHECK(j.find("\"pres0\"") != std::string::npos);
  CHECK(j.find("\"witnesses\"") != std::string::npos);
}
