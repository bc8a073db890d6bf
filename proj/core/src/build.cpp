#include "gdp/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gdp {

std::string tag_name(ConstraintTag t) {
  switch (t) {
    case ConstraintTag::UcDel: return "UC_DEL";
    case ConstraintTag::UcPres: return "UC_PRES";
    case ConstraintTag::Pc1: return "PC1";
    case ConstraintTag::Pc2: return "PC2";
    case ConstraintTag::Pc3: return "PC3";
    case ConstraintTag::Pc4: return "PC4";
    case ConstraintTag::Sc: return "SC";
  }
  return "?";
}

std::string mode_name(BuildMode m) {
  switch (m) {
    case BuildMode::Naive: return "naive";
    case BuildMode::Wildcard: return "wildcard";
    case BuildMode::Smoothed: return "smoothed";
  }
  return "?";
}

BuildMode parse_mode(const std::string& s) {
  if (s == "naive") return BuildMode::Naive;
  if (s == "wildcard") return BuildMode::Wildcard;
  if (s == "smoothed") return BuildMode::Smoothed;
  throw std::invalid_argument("unknown mode '" + s + "' (naive|wildcard|smoothed)");
}

int IlpModel::var_index(const VarId& id) const {
  if (id.kind == VarKind::Tuple) return id.index;
  const ViewContext& ctx = views.at(static_cast<std::size_t>(id.view));
  int base = id.kind == VarKind::Witness ? ctx.witness_var_base : ctx.view_var_base;
  if (base < 0) return -1;
  return base + id.index;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace

std::string IlpModel::var_name(int index) const {
  const VarInfo& v = variables.at(static_cast<std::size_t>(index));
  switch (v.id.kind) {
    case VarKind::Tuple: {
      const TupleRef& t = tuple_table.at(static_cast<std::size_t>(v.id.index));
      return "t_" + t.relation + "_" + hex64(fnv1a(t.str()));
    }
    case VarKind::Witness:
      return "w_" + views.at(v.id.view).label + "_" + std::to_string(v.id.index);
    case VarKind::View:
      return "v_" + views.at(v.id.view).label + "_" + std::to_string(v.id.index);
  }
  return "?";
}

std::int64_t IlpModel::objective_of(const std::vector<double>& values, double* out) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < variables.size(); ++i)
    acc += static_cast<double>(variables[i].objective) * values[i];
  if (out) *out = acc;
  return static_cast<std::int64_t>(std::llround(acc));
}

namespace {

struct Builder {
  const GdpInstance& inst;
  BuildMode mode;
  BuildOptions opts;
  IlpModel model;
  std::map<TupleRef, int> tuple_index;

  Builder(const GdpInstance& i, BuildMode m, BuildOptions o) : inst(i), mode(m), opts(o) {
    model.mode = m;
  }

  bool applies(ConstraintTag pc, ViewList list) const {
    if (mode == BuildMode::Naive) return true;
    bool lower_side = list == ViewList::Pres || list == ViewList::Min;
    if (pc == ConstraintTag::Pc1 || pc == ConstraintTag::Pc3) return lower_side;
    return !lower_side;  // PC2, PC4
  }

  void add_tuple_vars() {
    model.tuple_table = inst.db.all_tuples();
    for (std::size_t i = 0; i < model.tuple_table.size(); ++i) {
      tuple_index[model.tuple_table[i]] = static_cast<int>(i);
      model.variables.push_back(VarInfo{VarId{VarKind::Tuple, -1, static_cast<int>(i)}});
    }
  }

  void collapse_identity_view(const ViewDef& def, ViewList list) {
    std::int64_t sign = list == ViewList::Min ? 1 : -1;
    const std::string& rel = def.query.rules.front().body.front().relation;
    for (const auto& [row, mult] : inst.db.at(rel).rows)
      model.variables[tuple_index.at(TupleRef{rel, row})].objective += sign * mult;
  }

  // Allocates witness/view variables for one enumerated view.
  void allocate_vars(ViewContext& ctx, ViewList list, const ViewDef& def) {
    int vid = static_cast<int>(model.views.size());
    ctx.witness_var_base = static_cast<int>(model.variables.size());
    for (std::size_t wi = 0; wi < ctx.prov.witnesses.size(); ++wi)
      model.variables.push_back(VarInfo{VarId{VarKind::Witness, vid, static_cast<int>(wi)}});
    ctx.view_var_base = static_cast<int>(model.variables.size());
    for (std::size_t ti = 0; ti < ctx.prov.view_tuples.size(); ++ti) {
      VarInfo info{VarId{VarKind::View, vid, static_cast<int>(ti)}};
      if (list == ViewList::Min || list == ViewList::Max) {
        std::int64_t w = 1;
        if (def.identity) {
          const std::string& rel = def.query.rules.front().body.front().relation;
          w = tuple_weight(inst.db, TupleRef{rel, ctx.prov.view_tuples[ti]});
        }
        info.objective = (list == ViewList::Min ? 1 : -1) * w;
      }
      model.variables.push_back(info);
    }
  }

  void emit_view_constraints(const ViewContext& ctx, ViewList list, const ViewDef& def) {
    const ProvenanceIndex& prov = ctx.prov;
    auto wvar = [&](int wi) { return ctx.witness_var_base + wi; };
    auto vvar = [&](int ti) { return ctx.view_var_base + ti; };

    // User constraints.
    if (list == ViewList::Del && !ctx.saturated) {
      LinearConstraint c;
      for (std::size_t ti = 0; ti < prov.view_tuples.size(); ++ti)
        c.terms.emplace_back(vvar(static_cast<int>(ti)), 1);
      c.sense = Sense::Ge;
      c.rhs = def.k;
      c.tag = ConstraintTag::UcDel;
      model.constraints.push_back(std::move(c));
    }
    if (list == ViewList::Pres) {
      LinearConstraint c;
      for (std::size_t ti = 0; ti < prov.view_tuples.size(); ++ti)
        c.terms.emplace_back(vvar(static_cast<int>(ti)), 1);
      c.sense = Sense::Le;
      c.rhs = static_cast<std::int64_t>(prov.view_tuples.size()) - def.k;
      c.tag = ConstraintTag::UcPres;
      model.constraints.push_back(std::move(c));
    }

    bool smooth_pres = mode == BuildMode::Smoothed && list == ViewList::Pres;

    // PC1: X[t] <= X[w] for t in w. Replaced by SC on pres views in smoothed
    // mode unless explicitly kept.
    if (applies(ConstraintTag::Pc1, list) && (!smooth_pres || opts.keep_pc1_with_sc)) {
      if (ctx.saturated) {
        // witness vars fixed to 1, X[t] <= 1 is vacuous
      } else {
        for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
          for (const auto& t : prov.witnesses[wi].tuples) {
            LinearConstraint c;
            c.terms.emplace_back(tuple_index.at(t), 1);
            c.terms.emplace_back(wvar(static_cast<int>(wi)), -1);
            c.sense = Sense::Le;
            c.rhs = 0;
            c.tag = ConstraintTag::Pc1;
            model.constraints.push_back(std::move(c));
          }
        }
      }
    }

    // PC2: sum_{t in w} X[t] >= X[w].
    if (applies(ConstraintTag::Pc2, list)) {
      for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
        LinearConstraint c;
        for (const auto& t : prov.witnesses[wi].tuples) c.terms.emplace_back(tuple_index.at(t), 1);
        if (ctx.saturated) {
          c.rhs = 1;  // X[w] fixed to 1
        } else {
          c.terms.emplace_back(wvar(static_cast<int>(wi)), -1);
          c.rhs = 0;
        }
        c.sense = Sense::Ge;
        c.tag = ConstraintTag::Pc2;
        model.constraints.push_back(std::move(c));
      }
    }

    // PC3: 1 + sum_{w >= v} (X[w] - 1) <= X[v].
    if (applies(ConstraintTag::Pc3, list) && !ctx.saturated) {
      for (std::size_t ti = 0; ti < prov.view_tuples.size(); ++ti) {
        LinearConstraint c;
        for (int wi : prov.view_witnesses[ti]) c.terms.emplace_back(wvar(wi), 1);
        c.terms.emplace_back(vvar(static_cast<int>(ti)), -1);
        c.sense = Sense::Le;
        c.rhs = static_cast<std::int64_t>(prov.view_witnesses[ti].size()) - 1;
        c.tag = ConstraintTag::Pc3;
        model.constraints.push_back(std::move(c));
      }
    }

    // PC4: X[w] >= X[v] for v <= w.
    if (applies(ConstraintTag::Pc4, list) && !ctx.saturated) {
      for (std::size_t wi = 0; wi < prov.witnesses.size(); ++wi) {
        LinearConstraint c;
        c.terms.emplace_back(wvar(static_cast<int>(wi)), 1);
        c.terms.emplace_back(vvar(prov.witness_view[wi]), -1);
        c.sense = Sense::Ge;
        c.rhs = 0;
        c.tag = ConstraintTag::Pc4;
        model.constraints.push_back(std::move(c));
      }
    }

    // Smoothing: X[t] <= 1 + sum_{w: t in w, w >= v} (X[w] - 1), one row per
    // (view tuple, tuple) pair. With a single covering witness this is
    // coefficient-identical to PC1 and tagged accordingly.
    if (smooth_pres && !ctx.saturated) {
      for (std::size_t ti = 0; ti < prov.view_tuples.size(); ++ti) {
        std::map<int, std::vector<int>> tuple_to_covering;  // tuple var -> witness ids
        for (int wi : prov.view_witnesses[ti])
          for (const auto& t : prov.witnesses[wi].tuples)
            tuple_to_covering[tuple_index.at(t)].push_back(wi);
        for (const auto& [tv, wits] : tuple_to_covering) {
          LinearConstraint c;
          c.terms.emplace_back(tv, 1);
          for (int wi : wits) c.terms.emplace_back(wvar(wi), -1);
          c.sense = Sense::Le;
          c.rhs = 1 - static_cast<std::int64_t>(wits.size());
          c.tag = wits.size() == 1 ? ConstraintTag::Pc1 : ConstraintTag::Sc;
          model.constraints.push_back(std::move(c));
        }
      }
    }
  }

  void add_view(const ViewDef& def, ViewList list, std::size_t index_in_list) {
    ViewContext ctx;
    ctx.list = list;
    ctx.index_in_list = index_in_list;
    ctx.label = view_list_name(list) + std::to_string(model.views.size());
    ctx.identity = def.identity;
    ctx.k = def.k;

    bool soft = list == ViewList::Min || list == ViewList::Max;
    if (soft && def.identity && opts.collapse_identity) {
      ctx.collapsed = true;
      collapse_identity_view(def, list);
      model.views.push_back(std::move(ctx));
      return;
    }

    ctx.prov = enumerate_witnesses(inst.db, def.query, ctx.label);
    ctx.saturated = list == ViewList::Del && mode != BuildMode::Naive &&
                    def.k == static_cast<std::int64_t>(ctx.prov.view_tuples.size());
    if (!ctx.saturated) allocate_vars(ctx, list, def);
    model.views.push_back(std::move(ctx));
    // constraints are emitted afterwards so variable indexes are final
  }

  void emit_coupling(const TargetCoupling& c) {
    const ViewContext* del_ctx = nullptr;
    const ViewContext* min_ctx = nullptr;
    for (const auto& ctx : model.views) {
      if (ctx.list == ViewList::Del && ctx.index_in_list == c.del_index) del_ctx = &ctx;
      if (ctx.list == ViewList::Min && ctx.index_in_list == c.min_index) min_ctx = &ctx;
    }
    if (!del_ctx || !min_ctx || min_ctx->collapsed) return;
    int vt = min_ctx->prov.view_tuple_id(c.target);
    if (vt < 0) return;
    // Deleting the bound view's output deletes the target's copy in the
    // minimized view; this row keeps the LP relaxation from under-reporting.
    LinearConstraint row;
    row.terms.emplace_back(min_ctx->view_var_base + vt, 1);
    if (del_ctx->saturated) {
      row.rhs = 1;  // bound view forced deleted
    } else {
      if (del_ctx->prov.view_tuples.empty()) return;
      row.terms.emplace_back(del_ctx->view_var_base + 0, -1);
      row.rhs = 0;
    }
    row.sense = Sense::Ge;
    row.tag = ConstraintTag::UcDel;
    model.constraints.push_back(std::move(row));
  }

  IlpModel run() {
    add_tuple_vars();
    struct Pending {
      ViewList list;
      const std::vector<ViewDef>* defs;
    };
    const Pending lists[] = {{ViewList::Del, &inst.del_views},
                             {ViewList::Pres, &inst.pres_views},
                             {ViewList::Min, &inst.min_views},
                             {ViewList::Max, &inst.max_views}};
    for (const auto& [list, defs] : lists)
      for (std::size_t i = 0; i < defs->size(); ++i) add_view((*defs)[i], list, i);

    std::size_t vid = 0;
    for (const auto& [list, defs] : lists)
      for (std::size_t i = 0; i < defs->size(); ++i, ++vid)
        if (!model.views[vid].collapsed)
          emit_view_constraints(model.views[vid], list, (*defs)[i]);

    for (const auto& c : inst.couplings) emit_coupling(c);
    return std::move(model);
  }
};

}  // namespace

IlpModel build(const GdpInstance& instance, BuildMode mode, const BuildOptions& opts) {
  Builder b(instance, mode, opts);
  return b.run();
}

IlpModel lp_relaxation(IlpModel model) {
  for (auto& v : model.variables) v.integral = false;
  return model;
}

IlpModel prune_subsumed(IlpModel model) {
  // (tuple var, witness var) pairs covered by an SC with >= 2 witnesses
  std::set<std::pair<int, int>> covered;
  for (const auto& c : model.constraints) {
    if (c.tag != ConstraintTag::Sc) continue;
    int tuple_var = -1;
    std::vector<int> wits;
    for (const auto& [var, coeff] : c.terms) {
      if (coeff > 0)
        tuple_var = var;
      else
        wits.push_back(var);
    }
    if (tuple_var < 0 || wits.size() < 2) continue;
    for (int w : wits) covered.insert({tuple_var, w});
  }
  std::vector<LinearConstraint> kept;
  kept.reserve(model.constraints.size());
  for (auto& c : model.constraints) {
    if (c.tag == ConstraintTag::Pc1 && c.terms.size() == 2) {
      int tuple_var = c.terms[0].second > 0 ? c.terms[0].first : c.terms[1].first;
      int wit_var = c.terms[0].second > 0 ? c.terms[1].first : c.terms[0].first;
      if (covered.count({tuple_var, wit_var})) continue;
    }
    kept.push_back(std::move(c));
  }
  model.constraints = std::move(kept);
  return model;
}

std::size_t ModelStats::total_constraints() const {
  std::size_t n = 0;
  for (const auto& [tag, count] : constraints) n += count;
  return n;
}

ModelStats model_stats(const IlpModel& model) {
  ModelStats s;
  s.variables = model.variables.size();
  for (const auto& c : model.constraints) {
    ++s.constraints[c.tag];
    s.nonzeros += c.terms.size();
  }
  return s;
}

}  // namespace gdp
