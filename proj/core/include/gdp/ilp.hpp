#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gdp/instance.hpp"
#include "gdp/witness.hpp"

namespace gdp {

enum class VarKind { Tuple, Witness, View };

/// Variable identity: one Tuple variable per distinct database tuple shared
/// across all views; Witness/View variables belong to one view occurrence.
struct VarId {
  VarKind kind = VarKind::Tuple;
  int view = -1;   // global view occurrence index, -1 for tuples
  int index = 0;   // tuple table / witness / view tuple index
  auto operator<=>(const VarId&) const = default;
};

enum class ConstraintTag { UcDel, UcPres, Pc1, Pc2, Pc3, Pc4, Sc };

std::string tag_name(ConstraintTag t);

enum class Sense { Le, Ge, Eq };

struct LinearConstraint {
  std::vector<std::pair<int, std::int64_t>> terms;  // (variable index, coefficient)
  Sense sense = Sense::Le;
  std::int64_t rhs = 0;
  ConstraintTag tag = ConstraintTag::Pc1;
};

struct VarInfo {
  VarId id;
  double lower = 0.0;
  double upper = 1.0;
  bool integral = true;
  std::int64_t objective = 0;
};

enum class BuildMode { Naive, Wildcard, Smoothed };

std::string mode_name(BuildMode m);
BuildMode parse_mode(const std::string& s);

/// Per-view bookkeeping kept alongside the model for naming, extraction and
/// statistics. Collapsed identity views carry no provenance.
struct ViewContext {
  ViewList list = ViewList::Del;
  std::size_t index_in_list = 0;
  std::string label;        // e.g. "del0", "max2"
  bool identity = false;
  bool collapsed = false;   // folded into tuple objective weights
  bool saturated = false;   // del view with k = |view|: view/witness vars fixed to 1
  std::int64_t k = 0;
  ProvenanceIndex prov;     // empty when collapsed
  int witness_var_base = -1;
  int view_var_base = -1;
};

struct IlpModel {
  BuildMode mode = BuildMode::Smoothed;
  std::vector<VarInfo> variables;
  std::vector<LinearConstraint> constraints;
  std::vector<TupleRef> tuple_table;  // Tuple variable index -> tuple
  std::vector<ViewContext> views;

  int tuple_var(int tuple_index) const { return tuple_index; }
  int var_index(const VarId& id) const;
  std::string var_name(int index) const;
  std::int64_t objective_of(const std::vector<double>& values, double* out = nullptr) const;
};

struct BuildOptions {
  bool collapse_identity = true;   // fold identity min/max views into tuple weights
  bool keep_pc1_with_sc = false;   // emit classic PC1 alongside smoothing constraints
};

/// Compiles the instance into an integer linear program.
///
/// Emits the user constraints, the propagation constraints PC1-PC4 according
/// to the mode's application matrix (naive: all constraints on all views;
/// wildcard/smoothed: PC1+PC3 on pres/min views only, PC2+PC4 on del/max
/// views only), smoothing constraints replacing PC1 on pres views in
/// smoothed mode, and the objective over min/max view tuples with identity
/// views collapsed to multiplicity-weighted tuple variables.
IlpModel build(const GdpInstance& instance, BuildMode mode, const BuildOptions& opts = {});

/// Same model with all integrality flags cleared.
IlpModel lp_relaxation(IlpModel model);

/// Drops PC1 rows that are pointwise dominated by a smoothing constraint
/// over the same tuple and a witness set of size >= 2.
IlpModel prune_subsumed(IlpModel model);

struct ModelStats {
  std::size_t variables = 0;
  std::map<ConstraintTag, std::size_t> constraints;
  std::size_t nonzeros = 0;
  std::size_t total_constraints() const;
};

ModelStats model_stats(const IlpModel& model);

}  // namespace gdp
