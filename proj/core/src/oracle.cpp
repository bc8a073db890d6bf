#include "gdp/oracle.hpp"

#include <algorithm>

#include "gdp/witness.hpp"

namespace gdp {

OracleResult brute_force(const GdpInstance& instance, std::size_t cap) {
  std::vector<TupleRef> tuples = instance.db.all_tuples();
  std::size_t n = tuples.size();
  if (n > cap)
    throw OracleError("brute_force: " + std::to_string(n) + " distinct tuples exceed cap " +
                      std::to_string(cap));

  OracleResult result;
  result.explored = std::uint64_t{1} << n;

  std::vector<std::int64_t> del_before;
  for (const auto& v : instance.del_views)
    del_before.push_back(static_cast<std::int64_t>(evaluate_count(instance.db, v.query)));

  std::vector<TupleRef> gamma;
  for (std::uint64_t i = 0; i < result.explored; ++i) {
    std::uint64_t mask = i ^ (i >> 1);  // Gray code order
    gamma.clear();
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (std::uint64_t{1} << b)) gamma.push_back(tuples[b]);

    Database remaining = delete_tuples(instance.db, gamma);
    bool feasible = true;
    for (std::size_t vi = 0; vi < instance.del_views.size(); ++vi) {
      const auto& v = instance.del_views[vi];
      auto after = static_cast<std::int64_t>(evaluate_count(remaining, v.query));
      if (after > del_before[vi] - v.k) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      for (const auto& v : instance.pres_views) {
        auto after = static_cast<std::int64_t>(evaluate_count(remaining, v.query));
        if (after < v.k) {
          feasible = false;
          break;
        }
      }
    }
    if (!feasible) continue;

    std::int64_t objective = 0;
    for (const auto& v : instance.min_views)
      objective += weighted_view_delta(instance.db, v, gamma);
    for (const auto& v : instance.max_views)
      objective -= weighted_view_delta(instance.db, v, gamma);

    if (!result.feasible || objective < result.optimum ||
        (objective == result.optimum && gamma < result.gamma)) {
      result.feasible = true;
      result.optimum = objective;
      result.gamma = gamma;
    }
  }
  return result;
}

}  // namespace gdp
