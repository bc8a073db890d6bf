#pragma once

#include <map>
#include <string>
#include <vector>

#include "gdp/instance.hpp"
#include "gdp/query.hpp"

namespace gdp {

/// Atoms of one rule that carry at least one non-head variable, with edges
/// between atoms sharing a non-head variable.
struct ExistentialGraph {
  std::vector<std::size_t> nodes;               // atom indices into the rule body
  std::vector<std::vector<std::size_t>> edges;  // adjacency, aligned to nodes
  std::vector<std::vector<std::size_t>> components;  // node indices per component
};

ExistentialGraph existential_graph(const Rule& rule, const std::vector<std::string>& head_vars);

// Structural predicates for self-join-free single-rule queries. The
// transcribed definitions, with sources, are documented in structure.cpp.
bool is_self_join_free_cq(const Query& q);
bool head_clustering(const Query& q);
bool head_domination(const Query& q);
bool has_triad(const Query& q);   // expects a Boolean query
bool is_linear(const Query& q);   // expects a Boolean query

enum class Verdict { Ptime, Hard, Unknown };

std::string verdict_name(Verdict v);

struct VariantVerdict {
  Verdict verdict = Verdict::Unknown;
  std::string reason;
};

struct TractabilityReport {
  std::map<std::string, VariantVerdict> variants;  // keyed "dpss","dpvs","adpss","swp"
};

/// Pure function of query syntax and the semantics flag.
TractabilityReport classify(const Query& q, Semantics semantics);

/// Classifies the instance's subject query.
TractabilityReport classify(const GdpInstance& instance);

std::string report_to_json(const TractabilityReport& report, const Query& q, Semantics semantics);

}  // namespace gdp
