#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "gdp/solver.hpp"

namespace gdp {

namespace {

struct Node {
  double bound = 0.0;
  int depth = 0;
  std::uint64_t id = 0;
  std::vector<std::pair<int, bool>> fixings;  // (variable, fixed-to-one)
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min bound first
    if (a.depth != b.depth) return a.depth < b.depth;  // then deepest
    return a.id < b.id;                                // then most recent
  }
};

int most_fractional(const std::vector<double>& values, double int_tol) {
  int best = -1;
  double best_frac = int_tol;
  for (std::size_t j = 0; j < values.size(); ++j) {
    double frac = std::fabs(values[j] - std::round(values[j]));
    if (frac > best_frac) {
      best_frac = frac;
      best = static_cast<int>(j);
    }
  }
  return best;  // ties keep the lowest index
}

}  // namespace

MipResult solve_ilp(const IlpModel& model, const SolverOptions& opts) {
  for (const auto& v : model.variables)
    if (!v.integral)
      throw SolverError("solve_ilp requires a fully binary model; use solve_lp for relaxations");

  auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&]() {
    if (opts.time_limit_s <= 0) return false;
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - started;
    return dt.count() > opts.time_limit_s;
  };

  std::vector<double> base_lo, base_up;
  for (const auto& v : model.variables) {
    base_lo.push_back(v.lower);
    base_up.push_back(v.upper);
  }

  MipResult result;
  result.status = SolveStatus::Infeasible;
  bool have_incumbent = false;
  double incumbent = 0.0;

  // Objective coefficients are integers, so any bound can be rounded up.
  auto effective = [&](double bound) { return std::ceil(bound - 1e-6); };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  Node root;
  root.bound = -std::numeric_limits<double>::infinity();
  open.push(root);
  std::uint64_t next_id = 1;
  bool budget_hit = false;

  std::vector<double> lo = base_lo, up = base_up;
  while (!open.empty()) {
    if (result.node_count >= opts.max_nodes || out_of_time()) {
      budget_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (have_incumbent && effective(node.bound) >= incumbent - 1e-9) continue;

    lo = base_lo;
    up = base_up;
    for (const auto& [var, one] : node.fixings) {
      if (one)
        lo[var] = 1.0;
      else
        up[var] = 0.0;
    }

    LpSolution lp = solve_lp_bounded(model, lo, up, opts);
    ++result.node_count;
    if (lp.status == SolveStatus::NumericalFailure) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
    if (lp.status != SolveStatus::Optimal) continue;  // infeasible subtree

    // Popped bounds are the global dual bound and never decrease under
    // best-bound selection.
    result.bound_history.push_back(node.depth == 0 ? lp.objective : node.bound);

    if (have_incumbent && effective(lp.objective) >= incumbent - 1e-9) continue;

    int frac = most_fractional(lp.values, opts.int_tol);
    if (frac < 0) {
      double obj = std::round(lp.objective);
      if (!have_incumbent || obj < incumbent - 1e-9) {
        have_incumbent = true;
        incumbent = obj;
        result.values = lp.values;
        for (auto& v : result.values) v = std::round(v);
      }
      continue;
    }

    Node down{lp.objective, node.depth + 1, next_id++, node.fixings};
    down.fixings.emplace_back(frac, false);
    Node upn{lp.objective, node.depth + 1, next_id++, node.fixings};
    upn.fixings.emplace_back(frac, true);
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  double open_bound = std::numeric_limits<double>::infinity();
  if (!open.empty()) open_bound = open.top().bound;

  if (have_incumbent) {
    result.objective = incumbent;
    if (budget_hit && effective(open_bound) < incumbent - 1e-9) {
      result.status = SolveStatus::Budget;
      result.best_bound = open_bound;
    } else {
      result.status = SolveStatus::Optimal;
      result.best_bound = incumbent;
    }
  } else if (budget_hit) {
    result.status = SolveStatus::Budget;
    result.best_bound = open_bound;
  } else {
    result.status = SolveStatus::Infeasible;
  }
  return result;
}

IntegralityReport integrality_report(const IlpModel& model, const SolverOptions& opts) {
  IntegralityReport rep;
  LpSolution lp = solve_lp(lp_relaxation(model), opts);
  rep.lp_status = lp.status;
  rep.lp_objective = lp.objective;
  rep.lp_integral = lp.status == SolveStatus::Optimal && lp.is_integral(opts.int_tol);
  MipResult mip = solve_ilp(model, opts);
  rep.ilp_status = mip.status;
  rep.ilp_objective = mip.objective;
  if (rep.lp_status == SolveStatus::Optimal && rep.ilp_status == SolveStatus::Optimal)
    rep.gap = rep.ilp_objective - rep.lp_objective;
  return rep;
}

std::vector<TupleRef> extract_interventions(const IlpModel& model,
                                            const std::vector<double>& values, double int_tol) {
  std::vector<TupleRef> gamma;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const VarInfo& v = model.variables[j];
    if (v.id.kind != VarKind::Tuple) continue;
    double x = values.at(j);
    if (x >= 1.0 - int_tol) {
      gamma.push_back(model.tuple_table[static_cast<std::size_t>(v.id.index)]);
    } else if (x > int_tol) {
      throw SolverError("fractional tuple variable " + model.var_name(static_cast<int>(j)) +
                        " = " + std::to_string(x) + "; use solve_ilp for integral interventions");
    }
  }
  std::sort(gamma.begin(), gamma.end());
  return gamma;
}

}  // namespace gdp
