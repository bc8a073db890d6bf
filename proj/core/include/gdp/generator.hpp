#pragma once

#include <cstdint>
#include <string>

#include "gdp/query.hpp"
#include "gdp/relation.hpp"

namespace gdp {

struct GenProfile {
  Query query;                    // determines the schema
  std::size_t n_tuples = 0;       // split evenly across relations
  std::int64_t max_domain = 1000; // values drawn from [1 .. max_domain]
  Semantics semantics = Semantics::Set;
  std::int64_t max_bag = 10;      // bag multiplicities drawn from [1 .. max_bag]
  std::uint64_t seed = 0;
};

/// Deterministic synthetic database: per relation, tuples drawn uniformly
/// without replacement from [1..max_domain]^arity until the relation's share
/// of n_tuples is reached; bag multiplicities are independent uniform draws.
Database gen_random(const GenProfile& profile);

/// Named queries used by the experiment harness and tests.
/// Known names: q3star, q3star_sj, kstar<k>, chain2, triangle, tri_chain_union.
Query builtin_query(const std::string& name);

}  // namespace gdp
