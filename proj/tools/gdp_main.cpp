// gdp: compile deletion-propagation problems to integer linear programs,
// solve them exactly or via LP relaxation, and verify interventions.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gdp/experiment.hpp"
#include "gdp/oracle.hpp"
#include "gdp/solver.hpp"
#include "gdp/structure.hpp"
#include "gdp/witness.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace gdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct CommonArgs {
  std::string instance_path;
  std::string db_path;
  bool csv_header = false;
  std::string query_path;
  std::string variant = "generic";
  std::string target;
  std::int64_t k = 1;
  std::string mode = "smoothed";
  bool relax = false;
  std::string solver = "embedded";
  std::string solver_cmd;
  std::string out;
  std::uint64_t seed = 1;
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  std::uint64_t max_nodes = 1ull << 22;
  std::string dump_witnesses;
};

void add_instance_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--instance", args.instance_path, "instance config JSON");
  cmd->add_option("--db", args.db_path, "database manifest JSON");
  cmd->add_flag("--header", args.csv_header, "skip the first line of every CSV file");
  cmd->add_option("--query", args.query_path, "query file");
  cmd->add_option("--variant", args.variant, "dpss|dpvs|adpss|swp|res|generic")
      ->check(CLI::IsMember({"dpss", "dpvs", "adpss", "swp", "res", "generic"}));
  cmd->add_option("--target", args.target, "target view tuple, comma separated values");
  cmd->add_option("--k", args.k, "k for adpss");
}

void add_solver_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--mode", args.mode, "naive|wildcard|smoothed (default smoothed)");
  cmd->add_flag("--relax", args.relax, "solve the LP relaxation instead of the ILP");
  cmd->add_option("--solver", args.solver, "embedded|external")
      ->check(CLI::IsMember({"embedded", "external"}));
  cmd->add_option("--solver-cmd", args.solver_cmd,
                  "external solver command template with {lpfile} {solfile}");
  cmd->add_option("--feas-tol", args.feas_tol, "feasibility tolerance");
  cmd->add_option("--int-tol", args.int_tol, "integrality tolerance");
  cmd->add_option("--max-nodes", args.max_nodes, "branch and bound node budget");
  cmd->add_option("--dump-witnesses", args.dump_witnesses,
                  "write per-view provenance JSON to this file");
}

std::vector<Value> parse_target(const std::string& s) {
  std::vector<Value> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(parse_value(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(parse_value(cur));
  return out;
}

GdpInstance load_from_args(const CommonArgs& args) {
  if (!args.instance_path.empty()) return load_instance(args.instance_path);
  if (args.db_path.empty() || args.query_path.empty())
    throw InstanceError("provide --instance, or --db with --query and --variant");
  Database db = load_database(args.db_path, LoadOptions{args.csv_header});
  Query q = parse_query_file(args.query_path);
  if (args.variant == "dpss") return make_dpss(db, q, parse_target(args.target));
  if (args.variant == "dpvs") return make_dpvs(db, q, parse_target(args.target));
  if (args.variant == "adpss") return make_adpss(db, q, args.k);
  if (args.variant == "swp") return make_swp(db, q);
  if (args.variant == "res") return make_resilience(db, q.is_boolean() ? q : existential_query(q));
  throw InstanceError("--variant generic requires --instance");
}

SolverOptions solver_options(const CommonArgs& args) {
  SolverOptions opts;
  opts.feas_tol = args.feas_tol;
  opts.int_tol = args.int_tol;
  opts.max_nodes = args.max_nodes;
  return opts;
}

std::string external_cmd(const CommonArgs& args) {
  if (!args.solver_cmd.empty()) return args.solver_cmd;
  const char* env = std::getenv("GDP_SOLVER_CMD");
  return env ? env : "";
}

json value_json(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  return std::get<std::string>(v);
}

json gamma_json(const std::vector<TupleRef>& gamma) {
  json out = json::array();
  for (const auto& t : gamma) {
    json tj;
    tj["relation"] = t.relation;
    tj["values"] = json::array();
    for (const auto& v : t.values) tj["values"].push_back(value_json(v));
    out.push_back(tj);
  }
  return out;
}

std::vector<TupleRef> gamma_from_json(const json& arr) {
  std::vector<TupleRef> gamma;
  for (const auto& tj : arr) {
    TupleRef t;
    t.relation = tj.at("relation").get<std::string>();
    for (const auto& v : tj.at("values")) {
      if (v.is_number_integer())
        t.values.push_back(Value{v.get<std::int64_t>()});
      else
        t.values.push_back(Value{v.get<std::string>()});
    }
    gamma.push_back(std::move(t));
  }
  return gamma;
}

json report_json(const VerificationReport& report) {
  json out;
  out["feasible"] = report.feasible;
  out["objective"] = report.objective;
  out["violated"] = report.violated;
  out["deltas"] = json::array();
  for (const auto& d : report.deltas) {
    json dj;
    dj["view"] = view_list_name(d.list) + "[" + std::to_string(d.index) + "]";
    dj["delta"] = d.delta;
    if (d.list == ViewList::Del || d.list == ViewList::Pres) {
      dj["k"] = d.required_k;
      dj["satisfied"] = d.satisfied;
    }
    out["deltas"].push_back(dj);
  }
  return out;
}

json stats_json(const IlpModel& model) {
  ModelStats stats = model_stats(model);
  json out;
  out["variables"] = stats.variables;
  out["nonzeros"] = stats.nonzeros;
  out["constraints"] = json::object();
  for (const auto& [tag, count] : stats.constraints) out["constraints"][tag_name(tag)] = count;
  out["total_constraints"] = stats.total_constraints();
  return out;
}

void maybe_dump_witnesses(const CommonArgs& args, const IlpModel& model) {
  if (args.dump_witnesses.empty()) return;
  std::ofstream out(args.dump_witnesses);
  out << "[\n";
  bool first = true;
  for (const auto& ctx : model.views) {
    if (ctx.collapsed) continue;
    if (!first) out << ",\n";
    first = false;
    out << provenance_to_json(ctx.prov);
  }
  out << "\n]\n";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
  return dt.count();
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    out << j.dump(2) << std::endl;
  }
}

int cmd_solve(const CommonArgs& args) {
  auto t0 = std::chrono::steady_clock::now();
  GdpInstance inst = load_from_args(args);
  double load_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  IlpModel model = build(inst, parse_mode(args.mode));
  double build_ms = ms_since(t0);
  maybe_dump_witnesses(args, model);

  SolverOptions opts = solver_options(args);
  json out;
  out["mode"] = args.mode;
  out["stats"] = stats_json(model);

  t0 = std::chrono::steady_clock::now();
  if (args.relax) {
    LpSolution lp;
    if (args.solver == "external")
      lp = solve_external(model, external_cmd(args), /*relax=*/true);
    else
      lp = solve_lp(lp_relaxation(model), opts);
    double solve_ms = ms_since(t0);
    out["status"] = status_name(lp.status);
    out["timings_ms"] = {{"load", load_ms}, {"build", build_ms}, {"solve", solve_ms}};
    if (lp.status != SolveStatus::Optimal) {
      emit(out, args.out);
      return lp.status == SolveStatus::Infeasible ? kExitInfeasible : kExitInternal;
    }
    out["objective"] = lp.objective;
    out["lp_integral"] = lp.is_integral(opts.int_tol);
    emit(out, args.out);
    return kExitOk;
  }

  std::vector<double> values;
  if (args.solver == "external") {
    LpSolution sol = solve_external(model, external_cmd(args), /*relax=*/false);
    out["status"] = status_name(sol.status);
    out["objective"] = sol.objective;
    values = sol.values;
  } else {
    MipResult mip = solve_ilp(model, opts);
    out["status"] = status_name(mip.status);
    out["node_count"] = mip.node_count;
    out["best_bound"] = mip.best_bound;
    if (mip.status != SolveStatus::Optimal) {
      out["timings_ms"] = {{"load", load_ms}, {"build", build_ms}, {"solve", ms_since(t0)}};
      emit(out, args.out);
      return mip.status == SolveStatus::Infeasible ? kExitInfeasible : kExitInternal;
    }
    out["objective"] = mip.objective;
    values = mip.values;
  }
  double solve_ms = ms_since(t0);

  std::vector<TupleRef> gamma = extract_interventions(model, values, args.int_tol);
  VerificationReport report = verify(inst, gamma);
  out["gamma"] = gamma_json(gamma);
  out["verification"] = report_json(report);
  out["timings_ms"] = {{"load", load_ms}, {"build", build_ms}, {"solve", solve_ms}};
  emit(out, args.out);
  if (!report.feasible) {
    std::cerr << "solver produced an intervention that fails verification" << std::endl;
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_lp(const CommonArgs& args) {
  GdpInstance inst = load_from_args(args);
  IlpModel model = build(inst, parse_mode(args.mode));
  maybe_dump_witnesses(args, model);
  IntegralityReport rep = integrality_report(model, solver_options(args));
  json out;
  out["mode"] = args.mode;
  out["lp_status"] = status_name(rep.lp_status);
  out["ilp_status"] = status_name(rep.ilp_status);
  out["lp_objective"] = rep.lp_objective;
  out["ilp_objective"] = rep.ilp_objective;
  out["gap"] = rep.gap;
  out["lp_integral"] = rep.lp_integral;
  out["stats"] = stats_json(model);
  emit(out, args.out);
  if (rep.lp_status == SolveStatus::Infeasible) return kExitInfeasible;
  return kExitOk;
}

int cmd_analyze(const CommonArgs& args, const std::string& semantics_flag) {
  if (!args.query_path.empty()) {
    Query q = parse_query_file(args.query_path);
    Semantics sem = parse_semantics(semantics_flag);
    if (!args.db_path.empty()) sem = load_database(args.db_path).semantics;
    TractabilityReport report = classify(q, sem);
    std::cout << report_to_json(report, q, sem) << std::endl;
    return kExitOk;
  }
  GdpInstance inst = load_from_args(args);
  if (!inst.subject_query)
    throw InstanceError("instance has no subject query to analyze");
  TractabilityReport report = classify(inst);
  std::cout << report_to_json(report, *inst.subject_query, inst.db.semantics) << std::endl;
  return kExitOk;
}

int cmd_oracle(const CommonArgs& args, std::size_t cap) {
  GdpInstance inst = load_from_args(args);
  OracleResult res = brute_force(inst, cap);
  json out;
  out["feasible"] = res.feasible;
  out["explored"] = res.explored;
  if (res.feasible) {
    out["optimum"] = res.optimum;
    out["gamma"] = gamma_json(res.gamma);
  }
  emit(out, args.out);
  return res.feasible ? kExitOk : kExitInfeasible;
}

int cmd_verify(const CommonArgs& args, const std::string& gamma_path) {
  GdpInstance inst = load_from_args(args);
  std::ifstream in(gamma_path);
  if (!in) throw InstanceError("cannot open gamma file '" + gamma_path + "'");
  json j;
  in >> j;
  std::vector<TupleRef> gamma = gamma_from_json(j.is_array() ? j : j.at("gamma"));
  VerificationReport report = verify(inst, gamma);
  emit(report_json(report), args.out);
  return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_export_lp(const CommonArgs& args) {
  GdpInstance inst = load_from_args(args);
  IlpModel model = build(inst, parse_mode(args.mode));
  if (args.relax) model = lp_relaxation(std::move(model));
  if (args.out.empty()) throw InstanceError("export-lp requires --out");
  export_lp_file(model, args.out);
  std::cerr << "wrote " << args.out << std::endl;
  return kExitOk;
}

int cmd_gen(const CommonArgs& args, std::size_t n, const std::string& semantics,
            std::int64_t max_domain, std::int64_t max_bag) {
  if (args.query_path.empty()) throw InstanceError("gen requires --query");
  if (args.out.empty()) throw InstanceError("gen requires --out directory");
  Query q = parse_query_file(args.query_path);
  GenProfile profile{q, n, max_domain, parse_semantics(semantics), max_bag, args.seed};
  Database db = gen_random(profile);
  std::string manifest = save_database(db, args.out);
  json out;
  out["manifest"] = manifest;
  out["tuples"] = db.distinct_size();
  std::cout << out.dump(2) << std::endl;
  return kExitOk;
}

int cmd_bench(const std::string& config_path) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  auto records = run_experiment(cfg);
  std::size_t failures = 0;
  for (const auto& r : records)
    if (!r.error.empty()) ++failures;
  json out;
  out["runs"] = records.size();
  out["failures"] = failures;
  out["csv"] = cfg.out_csv;
  out["summary"] = cfg.out_summary;
  std::cout << out.dump(2) << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deletion propagation to integer linear programs"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string semantics_flag = "set";
  std::string gamma_path;
  std::size_t cap = 20;
  std::size_t gen_n = 100;
  std::string gen_semantics = "set";
  std::int64_t gen_max_domain = 1000;
  std::int64_t gen_max_bag = 10;
  std::string bench_config;

  CLI::App* solve = app.add_subcommand("solve", "build and solve an instance, verify the result");
  add_instance_flags(solve, args);
  add_solver_flags(solve, args);
  solve->add_option("--out", args.out, "write the JSON result here instead of stdout");

  CLI::App* lp = app.add_subcommand("lp", "LP relaxation vs ILP integrality report");
  add_instance_flags(lp, args);
  add_solver_flags(lp, args);
  lp->add_option("--out", args.out, "write the JSON result here instead of stdout");

  CLI::App* analyze = app.add_subcommand("analyze", "structural tractability report");
  add_instance_flags(analyze, args);
  analyze->add_option("--semantics", semantics_flag, "set|bag (with --query)");

  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive ground-truth optimum");
  add_instance_flags(oracle, args);
  oracle->add_option("--cap", cap, "maximum distinct tuples (default 20)");
  oracle->add_option("--out", args.out, "write the JSON result here instead of stdout");

  CLI::App* verify_cmd = app.add_subcommand("verify", "check an intervention against an instance");
  add_instance_flags(verify_cmd, args);
  verify_cmd->add_option("--gamma", gamma_path, "JSON gamma file or solve output")->required();
  verify_cmd->add_option("--out", args.out, "write the JSON result here instead of stdout");

  CLI::App* export_lp = app.add_subcommand("export-lp", "write the model in LP format");
  add_instance_flags(export_lp, args);
  export_lp->add_option("--mode", args.mode, "naive|wildcard|smoothed");
  export_lp->add_flag("--relax", args.relax, "export the LP relaxation");
  export_lp->add_option("--out", args.out, "output LP file")->required();

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic database for a query");
  gen->add_option("--query", args.query_path, "query file")->required();
  gen->add_option("--n", gen_n, "number of tuples");
  gen->add_option("--semantics", gen_semantics, "set|bag");
  gen->add_option("--max-domain", gen_max_domain, "domain size");
  gen->add_option("--max-bag", gen_max_bag, "maximum multiplicity");
  gen->add_option("--seed", args.seed, "random seed");
  gen->add_option("--out", args.out, "output directory")->required();

  CLI::App* bench = app.add_subcommand("bench", "run an experiment config");
  bench->add_option("--config", bench_config, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(args);
    if (lp->parsed()) return cmd_lp(args);
    if (analyze->parsed()) return cmd_analyze(args, semantics_flag);
    if (oracle->parsed()) return cmd_oracle(args, cap);
    if (verify_cmd->parsed()) return cmd_verify(args, gamma_path);
    if (export_lp->parsed()) return cmd_export_lp(args);
    if (gen->parsed()) return cmd_gen(args, gen_n, gen_semantics, gen_max_domain, gen_max_bag);
    if (bench->parsed()) return cmd_bench(bench_config);
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return kExitInternal;
  }
  return kExitUsage;
}
