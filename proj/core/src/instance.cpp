#include "gdp/instance.hpp"

#include <cmath>
#include <set>
#include <filesystem>
#include <fstream>

#include "gdp/witness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gdp {

std::string view_list_name(ViewList l) {
  switch (l) {
    case ViewList::Del: return "del";
    case ViewList::Pres: return "pres";
    case ViewList::Min: return "min";
    case ViewList::Max: return "max";
  }
  return "?";
}

const std::vector<ViewDef>& GdpInstance::list(ViewList l) const {
  switch (l) {
    case ViewList::Del: return del_views;
    case ViewList::Pres: return pres_views;
    case ViewList::Min: return min_views;
    case ViewList::Max: return max_views;
  }
  return del_views;
}

namespace {

bool view_contains(const Database& db, const Query& q, const std::vector<Value>& target) {
  return evaluate_count(db, bind_head(q, target)) > 0;
}

std::vector<ViewDef> identity_view_defs(const Database& db) {
  std::vector<ViewDef> out;
  for (auto& q : identity_queries(db)) out.push_back(ViewDef{std::move(q), 0, true});
  return out;
}

}  // namespace

GdpInstance make_dpss(const Database& db, const Query& q, const std::vector<Value>& target) {
  if (!view_contains(db, q, target))
    throw InstanceError("target " + values_to_string(target) + " is not in the view of '" +
                        q.name + "'");
  GdpInstance inst;
  inst.db = db;
  inst.del_views.push_back(ViewDef{bind_head(q, target), 1, false});
  inst.min_views = identity_view_defs(db);
  inst.subject_query = q;
  return inst;
}

GdpInstance make_resilience(const Database& db, const Query& q) {
  if (!q.is_boolean())
    throw InstanceError("resilience requires a boolean query, '" + q.name + "' has head arity " +
                        std::to_string(q.head_arity));
  if (evaluate_count(db, q) == 0)
    throw InstanceError("query '" + q.name + "' is false on the database, nothing to delete");
  GdpInstance inst;
  inst.db = db;
  inst.del_views.push_back(ViewDef{q, 1, false});
  inst.min_views = identity_view_defs(db);
  inst.subject_query = q;
  return inst;
}

GdpInstance make_dpvs(const Database& db, const Query& q, const std::vector<Value>& target) {
  if (!view_contains(db, q, target))
    throw InstanceError("target " + values_to_string(target) + " is not in the view of '" +
                        q.name + "'");
  GdpInstance inst;
  inst.db = db;
  inst.del_views.push_back(ViewDef{bind_head(q, target), 1, false});
  inst.min_views.push_back(ViewDef{q, 0, false});
  inst.couplings.push_back(TargetCoupling{0, 0, target});
  inst.subject_query = q;
  return inst;
}

GdpInstance make_adpss(const Database& db, const Query& q, std::int64_t k) {
  auto view_size = static_cast<std::int64_t>(evaluate_count(db, q));
  if (k < 1 || k > view_size)
    throw InstanceError("k = " + std::to_string(k) + " out of range [1, " +
                        std::to_string(view_size) + "] for '" + q.name + "'");
  GdpInstance inst;
  inst.db = db;
  inst.del_views.push_back(ViewDef{q, k, false});
  inst.min_views = identity_view_defs(db);
  inst.subject_query = q;
  return inst;
}

GdpInstance make_swp(const Database& db, const Query& q) {
  GdpInstance inst;
  inst.db = db;
  auto view_size = static_cast<std::int64_t>(evaluate_count(db, q));
  inst.pres_views.push_back(ViewDef{q, view_size, false});
  inst.max_views = identity_view_defs(db);
  inst.subject_query = q;
  return inst;
}

namespace {

ViewDef load_constrained_view(const json& entry, const fs::path& base, const Database& db,
                              ViewList list) {
  if (!entry.contains("query"))
    throw InstanceError(view_list_name(list) + " entries require a 'query' file");
  Query q = parse_query_file((base / entry.at("query").get<std::string>()).string());
  auto view_size = static_cast<std::int64_t>(evaluate_count(db, q));
  std::int64_t k = 0;
  if (entry.contains("k_percent")) {
    double pct = entry.at("k_percent").get<double>();
    k = static_cast<std::int64_t>(std::ceil(pct / 100.0 * static_cast<double>(view_size)));
  } else if (entry.contains("k")) {
    k = entry.at("k").get<std::int64_t>();
  } else {
    throw InstanceError(view_list_name(list) + " entry for '" + q.name +
                        "' requires 'k' or 'k_percent'");
  }
  std::int64_t lo = list == ViewList::Del ? 1 : 0;
  if (k < lo || k > view_size)
    throw InstanceError("k = " + std::to_string(k) + " out of range [" + std::to_string(lo) +
                        ", " + std::to_string(view_size) + "] for " + view_list_name(list) +
                        " view '" + q.name + "'");
  return ViewDef{std::move(q), k, false};
}

}  // namespace

GdpInstance load_instance(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw InstanceError("cannot open instance config '" + config_path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw InstanceError("instance config '" + config_path + "': " + e.what());
  }
  fs::path base = fs::path(config_path).parent_path();

  GdpInstance inst;
  inst.db = load_database((base / cfg.at("database").get<std::string>()).string());

  for (const auto& entry : cfg.value("del", json::array()))
    inst.del_views.push_back(load_constrained_view(entry, base, inst.db, ViewList::Del));
  for (const auto& entry : cfg.value("pres", json::array()))
    inst.pres_views.push_back(load_constrained_view(entry, base, inst.db, ViewList::Pres));

  auto load_soft = [&](const char* key, std::vector<ViewDef>& into) {
    for (const auto& entry : cfg.value(key, json::array())) {
      if (entry.value("identity", false)) {
        for (auto& v : identity_view_defs(inst.db)) into.push_back(std::move(v));
      } else if (entry.contains("query")) {
        Query q = parse_query_file((base / entry.at("query").get<std::string>()).string());
        into.push_back(ViewDef{std::move(q), 0, false});
      } else {
        throw InstanceError(std::string(key) + " entries need 'query' or 'identity': true");
      }
    }
  };
  load_soft("min", inst.min_views);
  load_soft("max", inst.max_views);

  for (const auto& views : {&inst.del_views, &inst.pres_views, &inst.min_views}) {
    for (const auto& v : *views) {
      if (!v.identity && !inst.subject_query) inst.subject_query = v.query;
    }
    if (inst.subject_query) break;
  }
  return inst;
}

std::int64_t weighted_view_delta(const Database& db, const ViewDef& view,
                                 const std::vector<TupleRef>& gamma) {
  if (view.identity) {
    // Identity view of one relation: each deleted tuple of that relation
    // removes one view tuple per copy.
    const std::string& rel = view.query.rules.front().body.front().relation;
    std::int64_t sum = 0;
    std::set<TupleRef> seen;
    for (const auto& t : gamma) {
      if (t.relation != rel || !seen.insert(t).second) continue;
      sum += tuple_weight(db, t);
    }
    return sum;
  }
  return static_cast<std::int64_t>(delta_count(db, view.query, gamma));
}

VerificationReport verify(const GdpInstance& instance, const std::vector<TupleRef>& gamma) {
  VerificationReport report;
  for (const auto& t : gamma)
    if (!instance.db.contains(t)) throw InstanceError("gamma tuple not in database: " + t.str());

  for (std::size_t i = 0; i < instance.del_views.size(); ++i) {
    const ViewDef& v = instance.del_views[i];
    auto delta = static_cast<std::int64_t>(delta_count(instance.db, v.query, gamma));
    bool ok = delta >= v.k;
    report.deltas.push_back(ViewDelta{ViewList::Del, i, delta, v.k, ok});
    if (!ok) {
      report.feasible = false;
      report.violated.push_back("del[" + std::to_string(i) + "]: deleted " +
                                std::to_string(delta) + " view tuples, require >= " +
                                std::to_string(v.k));
    }
  }
  for (std::size_t i = 0; i < instance.pres_views.size(); ++i) {
    const ViewDef& v = instance.pres_views[i];
    auto size = static_cast<std::int64_t>(evaluate_count(instance.db, v.query));
    auto delta = static_cast<std::int64_t>(delta_count(instance.db, v.query, gamma));
    bool ok = delta <= size - v.k;
    report.deltas.push_back(ViewDelta{ViewList::Pres, i, delta, v.k, ok});
    if (!ok) {
      report.feasible = false;
      report.violated.push_back("pres[" + std::to_string(i) + "]: preserved " +
                                std::to_string(size - delta) + " view tuples, require >= " +
                                std::to_string(v.k));
    }
  }
  for (std::size_t i = 0; i < instance.min_views.size(); ++i) {
    std::int64_t delta = weighted_view_delta(instance.db, instance.min_views[i], gamma);
    report.deltas.push_back(ViewDelta{ViewList::Min, i, delta, 0, true});
    report.objective += delta;
  }
  for (std::size_t i = 0; i < instance.max_views.size(); ++i) {
    std::int64_t delta = weighted_view_delta(instance.db, instance.max_views[i], gamma);
    report.deltas.push_back(ViewDelta{ViewList::Max, i, delta, 0, true});
    report.objective -= delta;
  }
  return report;
}

}  // namespace gdp
