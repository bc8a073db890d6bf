#include "doctest.h"
#include "gdp/structure.hpp"
#include "helpers.hpp"

using namespace gdp;
using namespace testutil;

TEST_CASE("parse_query reads rules") {
  Query q = parse_query("Q(x) :- R(x,y), S(y,z).");
  CHECK(q.name == "Q");
  CHECK(q.head_arity == 1);
  REQUIRE(q.rules.size() == 1);
  CHECK(q.rules[0].head_vars == std::vector<std::string>{"x"});
  REQUIRE(q.rules[0].body.size() == 2);
  CHECK(q.rules[0].body[0].relation == "R");
  CHECK(q.rules[0].body[1].relation == "S");
  CHECK(q.rules[0].var_order == std::vector<std::string>{"x", "y", "z"});

  SUBCASE("unions repeat the head") {
    Query u = builtin_query("tri_chain_union");
    REQUIRE(u.rules.size() == 2);
    CHECK(u.head_arity == 1);
    for (const auto& rule : u.rules)
      for (const auto& atom : rule.body) CHECK(atom.relation == "R");
  }

  SUBCASE("constants and comments") {
    Query c = parse_query("# leading comment\nQ(x) :- R(x, 3), S(x, 'abc').  # trailing\n");
    CHECK_FALSE(c.rules[0].body[0].terms[1].is_var);
    CHECK(c.rules[0].body[0].terms[1].constant == V(3));
    CHECK(c.rules[0].body[1].terms[1].constant == V("abc"));
  }

  SUBCASE("unsafe rules are rejected with the variable name") {
    CHECK_THROWS_WITH_AS(parse_query("Q(x) :- R(y,z)."), doctest::Contains("'x'"), ParseError);
  }

  SUBCASE("inconsistent head arity is rejected") {
    CHECK_THROWS_AS(parse_query("Q(x) :- R(x).\nQ(x,y) :- R(x), R(y)."), ParseError);
  }

  SUBCASE("syntax errors carry a position") {
    CHECK_THROWS_WITH_AS(parse_query("Q(x) :- R(x,\n"), doctest::Contains("line 2"), ParseError);
  }
}

TEST_CASE("printer and parser round-trip") {
  for (const char* name : {"q3star", "q3star_sj", "chain2", "triangle", "tri_chain_union"}) {
    Query q = builtin_query(name);
    Query again = parse_query(print_query(q));
    CHECK(again == q);
    CHECK(print_query(again) == print_query(q));
  }
  Query with_consts = parse_query("Q() :- R(1,y), S('a b',y).");
  CHECK(parse_query(print_query(with_consts)) == with_consts);
}

TEST_CASE("full_query promotes all body variables") {
  Query q = builtin_query("chain2");
  Query f = full_query(q);
  REQUIRE(f.rules.size() == 1);
  CHECK(f.rules[0].head_vars == std::vector<std::string>{"x", "y", "z"});
  CHECK(f.rules[0].body == q.rules[0].body);

  CHECK(full_query(f) == f);  // idempotent

  Query b = parse_query("Q() :- R(x).");
  CHECK(full_query(b).rules[0].head_vars == std::vector<std::string>{"x"});
}

TEST_CASE("full query preserves the witness set") {
  TestRng rng(7);
  for (const char* name : {"chain2", "q3star", "tri_chain_union"}) {
    Query q = builtin_query(name);
    Database db = random_db_for(q, 8, Semantics::Set, 3, 5);
    ProvenanceIndex direct = enumerate_witnesses(db, q);
    ProvenanceIndex via_full = enumerate_witnesses(db, full_query(q));
    REQUIRE(direct.witnesses.size() == via_full.witnesses.size());
    for (std::size_t i = 0; i < direct.witnesses.size(); ++i)
      CHECK(direct.witnesses[i].valuation == via_full.witnesses[i].valuation);
    // per rule, the full query's outputs are exactly its witnesses
    if (q.rules.size() == 1) CHECK(via_full.view_tuples.size() == via_full.witnesses.size());
  }
  (void)rng;
}

TEST_CASE("existential_query drops the head") {
  Query q = builtin_query("chain2");
  Query e = existential_query(q);
  CHECK(e.is_boolean());
  CHECK(e.rules[0].head_vars.empty());
  CHECK(e.rules[0].body == q.rules[0].body);

  Query b = builtin_query("triangle");
  CHECK(existential_query(b) == b);

  Query star = existential_query(builtin_query("q3star"));
  CHECK(star.is_boolean());
  CHECK_FALSE(has_triad(star));
}

TEST_CASE("bind_head substitutes constants into bodies") {
  Query q = parse_query("Q(x) :- R(x,y), S(x).");
  Query b = bind_head(q, {V(1)});
  CHECK(b.is_boolean());
  const Atom& r = b.rules[0].body[0];
  CHECK_FALSE(r.terms[0].is_var);
  CHECK(r.terms[0].constant == V(1));
  CHECK(r.terms[1].is_var);
  const Atom& s = b.rules[0].body[1];
  CHECK(s.terms[0].constant == V(1));

  SUBCASE("binding a boolean query is the identity") {
    Query boolean = builtin_query("triangle");
    CHECK(bind_head(boolean, {}) == boolean);
  }

  SUBCASE("arity mismatch is an error") {
    CHECK_THROWS_AS(bind_head(q, {V(1), V(2)}), std::invalid_argument);
  }

  SUBCASE("bound query is true exactly when the tuple is in the view") {
    Database db = chain_example_db();
    Query chain = builtin_query("chain2");
    ProvenanceIndex prov = enumerate_witnesses(db, chain);
    for (std::int64_t v = 0; v <= 4; ++v) {
      bool in_view = prov.view_tuple_id({V(v)}) >= 0;
      CHECK(in_view == (evaluate_count(db, bind_head(chain, {V(v)})) == 1));
    }
  }
}

TEST_CASE("identity_queries covers every relation in order") {
  Database db = make_db(Semantics::Set, {{"R", {V(1), V(2)}}, {"S", {V(1)}}});
  auto ids = identity_queries(db);
  REQUIRE(ids.size() == 2);
  CHECK(print_query(ids[0]) == "IdR(x1,x2) :- R(x1,x2).\n");
  CHECK(print_query(ids[1]) == "IdS(x1) :- S(x1).\n");

  CHECK(identity_queries(Database{}).empty());

  // identity views select all tuples
  Database tiny = tiny_swp_db();
  for (const auto& idq : identity_queries(tiny)) {
    const std::string rel = idq.rules[0].body[0].relation;
    CHECK(evaluate_count(tiny, idq) == tiny.at(rel).rows.size());
  }
}
