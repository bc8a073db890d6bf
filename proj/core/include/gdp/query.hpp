#pragma once

#include <string>
#include <vector>

#include "gdp/relation.hpp"

namespace gdp {

struct Term {
  bool is_var = true;
  std::string var;  // when is_var
  Value constant;   // when !is_var

  static Term variable(std::string name) { return Term{true, std::move(name), {}}; }
  static Term value(Value v) { return Term{false, {}, std::move(v)}; }
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> terms;
  bool operator==(const Atom&) const = default;

  std::vector<std::string> variables() const;  // distinct, in position order
};

struct Rule {
  std::vector<std::string> head_vars;
  std::vector<Atom> body;
  // All rule variables: head vars first (deduplicated, head order), then the
  // remaining body variables by first occurrence. Witness valuations follow
  // this order, so the head projection is a prefix.
  std::vector<std::string> var_order;

  bool operator==(const Rule&) const = default;
  void recompute_var_order();
  std::vector<std::string> body_variables() const;  // distinct, occurrence order
};

/// A union of conjunctive queries: one or more rules sharing a head.
struct Query {
  std::string name;
  std::size_t head_arity = 0;
  std::vector<Rule> rules;

  bool operator==(const Query&) const = default;
  bool is_boolean() const { return head_arity == 0; }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses one or more rules of the form
///   Name(v1,...,vk) :- R(t,...), S(t,...).
/// Constants are bare integers or single-quoted strings; `#` starts a line
/// comment. All rules must share the head name and arity, and every head
/// variable must occur in the rule body.
Query parse_query(const std::string& text);
Query parse_query_file(const std::string& path);

std::string print_query(const Query& q);

/// Promotes all body variables to the head, removing projection. Rules keep
/// their order; the heads of different rules may end up with different
/// lengths when the union's rules use different variable counts.
Query full_query(const Query& q);

/// Drops all head variables, yielding the Boolean version.
Query existential_query(const Query& q);

/// Substitutes the given constants for the head variables in every rule body
/// and returns the resulting Boolean query.
Query bind_head(const Query& q, const std::vector<Value>& constants);

/// One query `IdR(x1..xk) :- R(x1..xk)` per relation, in manifest order.
std::vector<Query> identity_queries(const Database& db);

}  // namespace gdp
