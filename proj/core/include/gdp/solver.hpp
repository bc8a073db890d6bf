#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdp/ilp.hpp"

namespace gdp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, Budget, NumericalFailure };

std::string status_name(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-7;       // constraint feasibility tolerance
  double int_tol = 1e-6;        // integrality tolerance
  std::uint64_t max_nodes = 1ull << 22;
  double time_limit_s = 0.0;    // 0 = unlimited
};

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;  // aligned with model.variables
  int import_warnings = 0;     // variables defaulted to 0 by import_solution

  double value_of(const IlpModel& model, const VarId& id) const;
  bool is_integral(double tol = 1e-6) const;
};

struct MipResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;      // integer for integer-coefficient objectives
  std::vector<double> values;
  double best_bound = 0.0;
  std::uint64_t node_count = 0;
  std::vector<double> bound_history;  // bound of each processed node
};

/// Bounded-variable primal simplex over the model's LP (integrality flags
/// ignored). Returns an optimal basic feasible solution, or the appropriate
/// status; numerical trouble is reported explicitly.
LpSolution solve_lp(const IlpModel& model, const SolverOptions& opts = {});

/// LP with per-variable bound overrides, used by branch and bound.
LpSolution solve_lp_bounded(const IlpModel& model, const std::vector<double>& lower,
                            const std::vector<double>& upper, const SolverOptions& opts = {});

/// Exact 0/1 optimum via LP-based branch and bound: most-fractional
/// branching (ties: lowest variable order), best-bound node selection
/// (ties: depth-first). Requires all variables binary.
MipResult solve_ilp(const IlpModel& model, const SolverOptions& opts = {});

struct IntegralityReport {
  SolveStatus lp_status = SolveStatus::Infeasible;
  SolveStatus ilp_status = SolveStatus::Infeasible;
  double lp_objective = 0.0;
  double ilp_objective = 0.0;
  double gap = 0.0;          // ilp - lp
  bool lp_integral = false;  // the LP optimum found is integral
};

IntegralityReport integrality_report(const IlpModel& model, const SolverOptions& opts = {});

/// Tuples whose variables are at 1 in an integral assignment. Fractional
/// tuple variables are an error directing the caller to solve_ilp.
std::vector<TupleRef> extract_interventions(const IlpModel& model,
                                            const std::vector<double>& values,
                                            double int_tol = 1e-6);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// LP-format interop -------------------------------------------------------

/// Writes the model in textual LP format (Minimize / Subject To / Bounds /
/// Binaries). Deterministic names and ordering; re-export is byte-identical.
void export_lp_file(const IlpModel& model, const std::string& path);

/// Reads a whitespace-separated `varname value` solution dump. Unknown names
/// are an error; missing variables default to 0 and are counted in
/// import_warnings. The objective is recomputed from the assignment.
LpSolution import_solution(const IlpModel& model, const std::string& path);

/// Exports the model, runs `cmd_template` with {lpfile}/{solfile} substituted,
/// and imports the resulting solution file.
LpSolution solve_external(const IlpModel& model, const std::string& cmd_template,
                          bool relax = false);

}  // namespace gdp
