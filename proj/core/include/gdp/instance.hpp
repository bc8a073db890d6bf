#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdp/query.hpp"
#include "gdp/relation.hpp"

namespace gdp {

enum class ViewList { Del, Pres, Min, Max };

std::string view_list_name(ViewList l);

struct ViewDef {
  Query query;
  std::int64_t k = 0;    // del: required deletions; pres: required preservations
  bool identity = false; // min/max identity views are objective-weight views
};

/// Marks a deletion view as the head-bound restriction of a min view: the
/// target's min-view tuple is necessarily deleted whenever the bound view is,
/// which the ILP builder turns into a coupling constraint.
struct TargetCoupling {
  std::size_t del_index = 0;
  std::size_t min_index = 0;
  std::vector<Value> target;
};

/// The four ordered view lists of one deletion-propagation problem over a
/// single database. Hard constraints: delete at least k from each del view,
/// preserve at least k in each pres view. Objective: minimize deletions from
/// min views minus deletions from max views.
struct GdpInstance {
  Database db;
  std::vector<ViewDef> del_views;
  std::vector<ViewDef> pres_views;
  std::vector<ViewDef> min_views;
  std::vector<ViewDef> max_views;
  std::vector<TargetCoupling> couplings;
  std::optional<Query> subject_query;  // original query, for structural analysis

  const std::vector<ViewDef>& list(ViewList l) const;
};

struct ViewDelta {
  ViewList list;
  std::size_t index = 0;
  std::int64_t delta = 0;       // view tuples deleted (weighted for identity views)
  std::int64_t required_k = 0;  // del/pres only
  bool satisfied = true;
};

struct VerificationReport {
  bool feasible = true;
  std::vector<ViewDelta> deltas;
  std::int64_t objective = 0;  // sum of min deltas - sum of max deltas
  std::vector<std::string> violated;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reductions of the classical variants.
GdpInstance make_dpss(const Database& db, const Query& q, const std::vector<Value>& target);
GdpInstance make_resilience(const Database& db, const Query& q);
GdpInstance make_dpvs(const Database& db, const Query& q, const std::vector<Value>& target);
GdpInstance make_adpss(const Database& db, const Query& q, std::int64_t k);
GdpInstance make_swp(const Database& db, const Query& q);

/// Loads a generic instance from JSON:
///   {"database": "manifest.json",
///    "del":  [{"query": "q.q", "k": 1} | {"query": "q.q", "k_percent": 2.0}],
///    "pres": [... same shape ...],
///    "min":  [{"query": "q.q"} | {"identity": true}],
///    "max":  [...]}
/// Relative paths resolve against the config file directory. Percentages are
/// turned into k = ceil(pct/100 * |view|).
GdpInstance load_instance(const std::string& config_path);

/// Recomputes every view on db \ gamma, checks both hard constraint
/// families, and reports the true objective. Never consults ILP artifacts.
VerificationReport verify(const GdpInstance& instance, const std::vector<TupleRef>& gamma);

/// Deletion count of one view under gamma; identity views weight deleted
/// tuples by multiplicity, other views count distinct view tuples.
std::int64_t weighted_view_delta(const Database& db, const ViewDef& view,
                                 const std::vector<TupleRef>& gamma);

}  // namespace gdp
