// Structural tractability checks. The predicates below are transcribed from
// the resilience / deletion-propagation literature:
//  - triad, linear query: Freire, Gatterbauer, Immerman, Meliou, "The
//    Complexity of Resilience and Responsibility for Self-Join-Free
//    Conjunctive Queries" (PVLDB 2015) and Makhija, Gatterbauer, "A Unified
//    Approach for Resilience and Causal Responsibility" (2024): a triad is a
//    set of three atoms such that for each pair there is a path connecting
//    them whose linking variables avoid the third atom's variables; a query
//    is linear when its atoms admit an order in which every variable's
//    occurrences are contiguous.
//  - head domination: Kimelfeld, Vondrak, Williams, "Maximizing Conjunctive
//    Views in Deletion Propagation" (TODS 2012): every existentially
//    connected component contains an atom whose head variables dominate the
//    head variables of the whole component.
//  - head clustering: Hu, Sintos, "Finding Smallest Witnesses for Conjunctive
//    Queries" (ICDT 2024): all atoms of an existentially connected component
//    share exactly the same head variables.

#include "gdp/structure.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "gdp/witness.hpp"
#include "json.hpp"

namespace gdp {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Ptime: return "PTIME";
    case Verdict::Hard: return "HARD";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

ExistentialGraph existential_graph(const Rule& rule, const std::vector<std::string>& head_vars) {
  ExistentialGraph g;
  std::set<std::string> head(head_vars.begin(), head_vars.end());
  std::vector<std::set<std::string>> exvars;  // non-head variables per node
  for (std::size_t ai = 0; ai < rule.body.size(); ++ai) {
    std::set<std::string> ex;
    for (const auto& v : rule.body[ai].variables())
      if (!head.count(v)) ex.insert(v);
    if (!ex.empty()) {
      g.nodes.push_back(ai);
      exvars.push_back(std::move(ex));
    }
  }
  g.edges.assign(g.nodes.size(), {});
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      bool shared = std::any_of(exvars[i].begin(), exvars[i].end(),
                                [&](const std::string& v) { return exvars[j].count(v) != 0; });
      if (shared) {
        g.edges[i].push_back(j);
        g.edges[j].push_back(i);
      }
    }
  std::vector<int> comp(g.nodes.size(), -1);
  for (std::size_t s = 0; s < g.nodes.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s}, members;
    comp[s] = static_cast<int>(g.components.size());
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (std::size_t v : g.edges[u])
        if (comp[v] < 0) {
          comp[v] = comp[s];
          stack.push_back(v);
        }
    }
    std::sort(members.begin(), members.end());
    g.components.push_back(std::move(members));
  }
  return g;
}

bool is_self_join_free_cq(const Query& q) {
  if (q.rules.size() != 1) return false;
  std::set<std::string> rels;
  for (const auto& atom : q.rules.front().body)
    if (!rels.insert(atom.relation).second) return false;
  return true;
}

namespace {

void require_sjfree(const Query& q, const char* what) {
  if (!is_self_join_free_cq(q))
    throw std::invalid_argument(std::string(what) +
                                " is defined for self-join-free conjunctive queries only");
}

std::set<std::string> head_vars_of_atom(const Atom& atom, const std::set<std::string>& head) {
  std::set<std::string> out;
  for (const auto& v : atom.variables())
    if (head.count(v)) out.insert(v);
  return out;
}

}  // namespace

bool head_clustering(const Query& q) {
  require_sjfree(q, "head_clustering");
  const Rule& rule = q.rules.front();
  std::set<std::string> head(rule.head_vars.begin(), rule.head_vars.end());
  ExistentialGraph g = existential_graph(rule, rule.head_vars);
  for (const auto& comp : g.components) {
    std::set<std::string> first = head_vars_of_atom(rule.body[g.nodes[comp.front()]], head);
    for (std::size_t node : comp)
      if (head_vars_of_atom(rule.body[g.nodes[node]], head) != first) return false;
  }
  return true;
}

bool head_domination(const Query& q) {
  require_sjfree(q, "head_domination");
  const Rule& rule = q.rules.front();
  std::set<std::string> head(rule.head_vars.begin(), rule.head_vars.end());
  ExistentialGraph g = existential_graph(rule, rule.head_vars);
  for (const auto& comp : g.components) {
    std::set<std::string> comp_head;
    for (std::size_t node : comp)
      for (const auto& v : head_vars_of_atom(rule.body[g.nodes[node]], head)) comp_head.insert(v);
    bool dominated = false;
    for (std::size_t node : comp) {
      std::set<std::string> atom_head = head_vars_of_atom(rule.body[g.nodes[node]], head);
      if (std::includes(atom_head.begin(), atom_head.end(), comp_head.begin(), comp_head.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) return false;
  }
  return true;
}

namespace {

// Is there a path between atoms a and b whose linking variables avoid
// `forbidden`? Atoms are adjacent when they share a variable outside the
// forbidden set.
bool connected_avoiding(const std::vector<std::set<std::string>>& vars, std::size_t a,
                        std::size_t b, const std::set<std::string>& forbidden) {
  std::size_t n = vars.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    if (u == b) return true;
    for (std::size_t v = 0; v < n; ++v) {
      if (seen[v]) continue;
      bool linked = false;
      for (const auto& x : vars[u])
        if (!forbidden.count(x) && vars[v].count(x)) {
          linked = true;
          break;
        }
      if (linked) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

bool has_triad(const Query& q) {
  require_sjfree(q, "has_triad");
  const Rule& rule = q.rules.front();
  std::size_t n = rule.body.size();
  if (n < 3) return false;
  std::vector<std::set<std::string>> vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto vs = rule.body[i].variables();
    vars[i] = std::set<std::string>(vs.begin(), vs.end());
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        std::size_t t[3] = {a, b, c};
        bool triad = true;
        for (int k = 0; k < 3 && triad; ++k) {
          std::size_t x = t[(k + 1) % 3], y = t[(k + 2) % 3];
          triad = connected_avoiding(vars, x, y, vars[t[k]]);
        }
        if (triad) return true;
      }
  return false;
}

bool is_linear(const Query& q) {
  require_sjfree(q, "is_linear");
  const Rule& rule = q.rules.front();
  std::size_t n = rule.body.size();
  if (n > 10) throw std::invalid_argument("is_linear: too many atoms for exhaustive ordering");
  std::vector<std::set<std::string>> vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto vs = rule.body[i].variables();
    vars[i] = std::set<std::string>(vs.begin(), vs.end());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  do {
    bool ok = true;
    std::set<std::string> open, closed;
    for (std::size_t pos = 0; pos < n && ok; ++pos) {
      const auto& vs = vars[order[pos]];
      for (const auto& v : vs)
        if (closed.count(v)) {
          ok = false;
          break;
        }
      if (!ok) break;
      for (auto it = open.begin(); it != open.end();) {
        if (!vs.count(*it)) {
          closed.insert(*it);
          it = open.erase(it);
        } else {
          ++it;
        }
      }
      for (const auto& v : vs) open.insert(v);
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

namespace {

// Tractability recursion for aggregated deletion: Boolean base reduces to the
// triad criterion, a singleton relation is immediately tractable, universal
// head attributes are stripped, and disconnected parts recurse independently.
struct AdpAtom {
  std::set<std::string> vars;
};

bool adp_tractable(std::vector<AdpAtom> atoms, std::set<std::string> head);

bool adp_boolean_triad_free(const std::vector<AdpAtom>& atoms) {
  // reuse has_triad by rebuilding a query-like structure
  std::size_t n = atoms.size();
  if (n < 3) return true;
  std::vector<std::set<std::string>> vars;
  for (const auto& a : atoms) vars.push_back(a.vars);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        std::size_t t[3] = {a, b, c};
        bool triad = true;
        for (int k = 0; k < 3 && triad; ++k) {
          std::size_t x = t[(k + 1) % 3], y = t[(k + 2) % 3];
          triad = connected_avoiding(vars, x, y, vars[t[k]]);
        }
        if (triad) return false;
      }
  return true;
}

bool adp_has_singleton(const std::vector<AdpAtom>& atoms, const std::set<std::string>& head) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& g = atoms[i].vars;
    bool subset_all = true;
    for (std::size_t j = 0; j < atoms.size() && subset_all; ++j) {
      if (i == j) continue;
      subset_all = std::includes(atoms[j].vars.begin(), atoms[j].vars.end(), g.begin(), g.end());
    }
    if (subset_all) return true;
    if (std::includes(head.begin(), head.end(), g.begin(), g.end())) return true;
    if (std::includes(g.begin(), g.end(), head.begin(), head.end())) return true;
  }
  return false;
}

bool adp_tractable(std::vector<AdpAtom> atoms, std::set<std::string> head) {
  if (atoms.empty()) return true;
  if (head.empty()) return adp_boolean_triad_free(atoms);
  if (adp_has_singleton(atoms, head)) return true;

  // strip a universal head attribute
  for (const auto& h : head) {
    bool universal = std::all_of(atoms.begin(), atoms.end(),
                                 [&](const AdpAtom& a) { return a.vars.count(h) != 0; });
    if (universal) {
      std::vector<AdpAtom> stripped = atoms;
      for (auto& a : stripped) a.vars.erase(h);
      std::set<std::string> new_head = head;
      new_head.erase(h);
      return adp_tractable(std::move(stripped), std::move(new_head));
    }
  }

  // split disconnected components (atoms connected by any shared variable)
  std::size_t n = atoms.size();
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = ncomp++;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (comp[v] >= 0) continue;
        bool shared = std::any_of(atoms[u].vars.begin(), atoms[u].vars.end(),
                                  [&](const std::string& x) { return atoms[v].vars.count(x); });
        if (shared) {
          comp[v] = comp[u];
          stack.push_back(v);
        }
      }
    }
  }
  if (ncomp <= 1) return false;  // no applicable decomposition
  for (int c = 0; c < ncomp; ++c) {
    std::vector<AdpAtom> part;
    std::set<std::string> part_head;
    for (std::size_t i = 0; i < n; ++i)
      if (comp[i] == c) {
        part.push_back(atoms[i]);
        for (const auto& v : atoms[i].vars)
          if (head.count(v)) part_head.insert(v);
      }
    if (!adp_tractable(std::move(part), std::move(part_head))) return false;
  }
  return true;
}

bool adp_criterion(const Query& q) {
  const Rule& rule = q.rules.front();
  std::vector<AdpAtom> atoms;
  for (const auto& a : rule.body) {
    auto vs = a.variables();
    atoms.push_back(AdpAtom{std::set<std::string>(vs.begin(), vs.end())});
  }
  return adp_tractable(std::move(atoms),
                       std::set<std::string>(rule.head_vars.begin(), rule.head_vars.end()));
}

// Alpha-equivalence of two rules: some atom permutation admits a variable
// bijection mapping one body onto the other with heads aligned.
bool rules_alpha_equivalent(const Rule& a, const Rule& b) {
  if (a.body.size() != b.body.size() || a.head_vars.size() != b.head_vars.size()) return false;
  std::vector<std::size_t> perm(b.body.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::map<std::string, std::string> fwd, bwd;
    bool ok = true;
    auto map_var = [&](const std::string& x, const std::string& y) {
      auto f = fwd.find(x);
      auto g = bwd.find(y);
      if (f == fwd.end() && g == bwd.end()) {
        fwd[x] = y;
        bwd[y] = x;
        return true;
      }
      return f != fwd.end() && f->second == y && g != bwd.end() && g->second == x;
    };
    for (std::size_t i = 0; i < a.head_vars.size() && ok; ++i)
      ok = map_var(a.head_vars[i], b.head_vars[i]);
    for (std::size_t i = 0; i < a.body.size() && ok; ++i) {
      const Atom& x = a.body[i];
      const Atom& y = b.body[perm[i]];
      if (x.relation != y.relation || x.terms.size() != y.terms.size()) {
        ok = false;
        break;
      }
      for (std::size_t p = 0; p < x.terms.size() && ok; ++p) {
        if (x.terms[p].is_var != y.terms[p].is_var) {
          ok = false;
        } else if (x.terms[p].is_var) {
          ok = map_var(x.terms[p].var, y.terms[p].var);
        } else {
          ok = x.terms[p].constant == y.terms[p].constant;
        }
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// The union of a self-joined triangle and a 2-chain over one ternary
// relation, sharing the head attribute; tractable for view side effects and
// witness preservation under bag semantics.
bool is_triangle_chain_union(const Query& q) {
  static const Query pattern = parse_query(
      "Q(x) :- R(x,a,b), R(x,b,c), R(x,c,a).\n"
      "Q(x) :- R(x,e,f), R(x,f,g).\n");
  if (q.rules.size() != 2 || q.head_arity != 1) return false;
  std::set<std::string> rels;
  for (const auto& r : q.rules)
    for (const auto& a : r.body) rels.insert(a.relation);
  if (rels.size() != 1) return false;
  auto match = [&](const Rule& x, const Rule& y) {
    Rule px = x, py = y;
    return rules_alpha_equivalent(px, py);
  };
  return (match(q.rules[0], pattern.rules[0]) && match(q.rules[1], pattern.rules[1])) ||
         (match(q.rules[0], pattern.rules[1]) && match(q.rules[1], pattern.rules[0]));
}

}  // namespace

TractabilityReport classify(const Query& q, Semantics semantics) {
  TractabilityReport report;
  auto& dpss = report.variants["dpss"];
  auto& dpvs = report.variants["dpvs"];
  auto& adpss = report.variants["adpss"];
  auto& swp = report.variants["swp"];

  if (is_triangle_chain_union(q) && semantics == Semantics::Bag) {
    dpvs = {Verdict::Ptime, "triangle/chain union over one relation: side-effect-free optimum"};
    swp = {Verdict::Ptime, "triangle/chain union over one relation: chain rule dominates"};
    dpss = {Verdict::Hard, "reduces to the self-join chain, hard under bag semantics"};
    adpss = {Verdict::Hard, "generalizes the source-side-effect case"};
    return report;
  }

  if (!is_self_join_free_cq(q)) {
    std::string why = q.rules.size() != 1 ? "union of rules" : "query has self-joins";
    dpss = dpvs = adpss = swp = {Verdict::Unknown, why + ": outside the classified fragment"};
    return report;
  }

  Query qe = existential_query(q);
  if (semantics == Semantics::Set) {
    if (!has_triad(qe))
      dpss = {Verdict::Ptime, "existential query is triad-free"};
    else
      dpss = {Verdict::Hard, "existential query contains a triad"};
  } else {
    if (is_linear(qe))
      dpss = {Verdict::Ptime, "existential query is linear"};
    else
      dpss = {Verdict::Hard, "existential query is not linear"};
  }

  bool hd = head_domination(q);
  if (semantics == Semantics::Set)
    dpvs = hd ? VariantVerdict{Verdict::Ptime, "query has head domination"}
              : VariantVerdict{Verdict::Hard, "query lacks head domination"};
  else
    dpvs = hd ? VariantVerdict{Verdict::Unknown, "head domination shown for set semantics only"}
              : VariantVerdict{Verdict::Unknown, "no criterion for bag semantics"};

  bool hc = head_clustering(q);
  if (hc)
    swp = {Verdict::Ptime, "query has head clustering"};
  else
    swp = semantics == Semantics::Set
              ? VariantVerdict{Verdict::Hard, "query lacks head clustering"}
              : VariantVerdict{Verdict::Unknown, "no hardness criterion for bag semantics"};

  bool adp = adp_criterion(q);
  if (semantics == Semantics::Set)
    adpss = adp ? VariantVerdict{Verdict::Ptime, "decomposition recursion reaches tractable bases"}
                : VariantVerdict{Verdict::Hard, "decomposition recursion gets stuck"};
  else
    adpss = {Verdict::Unknown, "criterion shown for set semantics only"};

  return report;
}

TractabilityReport classify(const GdpInstance& instance) {
  if (!instance.subject_query.has_value()) {
    TractabilityReport report;
    for (const char* v : {"dpss", "dpvs", "adpss", "swp"})
      report.variants[v] = {Verdict::Unknown, "instance has no subject query"};
    return report;
  }
  return classify(*instance.subject_query, instance.db.semantics);
}

std::string report_to_json(const TractabilityReport& report, const Query& q, Semantics semantics) {
  nlohmann::json j;
  j["query"] = print_query(q);
  j["semantics"] = semantics_name(semantics);
  for (const auto& [name, vv] : report.variants) {
    j["variants"][name] = {{"verdict", verdict_name(vv.verdict)}, {"reason", vv.reason}};
  }
  return j.dump(2);
}

}  // namespace gdp
