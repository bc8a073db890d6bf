#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gdp/instance.hpp"

namespace gdp {

struct OracleResult {
  bool feasible = false;
  std::int64_t optimum = 0;        // valid when feasible
  std::vector<TupleRef> gamma;     // lexicographically least optimal intervention
  std::uint64_t explored = 0;      // subsets enumerated
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive ground truth: enumerates all subsets of the distinct tuples in
/// Gray-code order, re-evaluates every view from scratch per subset, and
/// returns the minimum objective with the lexicographically least optimal
/// gamma. Refuses databases with more than `cap` distinct tuples.
OracleResult brute_force(const GdpInstance& instance, std::size_t cap = 20);

}  // namespace gdp
