#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gdp/solver.hpp"

namespace fs = std::filesystem;

namespace gdp {

namespace {

void write_terms(std::ostream& out, const std::vector<std::pair<int, std::int64_t>>& terms,
                 const IlpModel& model) {
  bool first = true;
  for (const auto& [var, coeff] : terms) {
    if (coeff == 0) continue;
    std::int64_t a = coeff;
    if (first) {
      if (a < 0) {
        out << "- ";
        a = -a;
      }
      first = false;
    } else {
      out << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    if (a != 1) out << a << " ";
    out << model.var_name(var);
  }
  if (first) out << "0";
}

}  // namespace

void export_lp_file(const IlpModel& model, const std::string& path) {
  std::map<std::string, int> names;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    auto [it, inserted] = names.emplace(model.var_name(static_cast<int>(j)), j);
    if (!inserted)
      throw SolverError("variable name collision: " + it->first);
  }

  std::ofstream out(path);
  if (!out) throw SolverError("cannot write LP file '" + path + "'");

  out << "Minimize\n obj: ";
  {
    std::vector<std::pair<int, std::int64_t>> obj;
    for (std::size_t j = 0; j < model.variables.size(); ++j)
      if (model.variables[j].objective != 0)
        obj.emplace_back(static_cast<int>(j), model.variables[j].objective);
    write_terms(out, obj, model);
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& c = model.constraints[i];
    out << " c" << i << ": ";
    write_terms(out, c.terms, model);
    switch (c.sense) {
      case Sense::Le: out << " <= "; break;
      case Sense::Ge: out << " >= "; break;
      case Sense::Eq: out << " = "; break;
    }
    out << c.rhs << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto& v = model.variables[j];
    out << " " << v.lower << " <= " << model.var_name(static_cast<int>(j)) << " <= " << v.upper
        << "\n";
  }
  bool any_binary = false;
  for (const auto& v : model.variables) any_binary |= v.integral;
  if (any_binary) {
    out << "Binaries\n";
    for (std::size_t j = 0; j < model.variables.size(); ++j)
      if (model.variables[j].integral) out << " " << model.var_name(static_cast<int>(j)) << "\n";
  }
  out << "End\n";
}

LpSolution import_solution(const IlpModel& model, const std::string& path) {
  std::map<std::string, int> names;
  for (std::size_t j = 0; j < model.variables.size(); ++j)
    names.emplace(model.var_name(static_cast<int>(j)), static_cast<int>(j));

  std::ifstream in(path);
  if (!in) throw SolverError("cannot open solution file '" + path + "'");

  LpSolution sol;
  sol.values.assign(model.variables.size(), 0.0);
  std::vector<bool> seen(model.variables.size(), false);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;  // blank line
    double value;
    if (!(ss >> value))
      throw SolverError(path + ":" + std::to_string(lineno) + ": expected 'varname value'");
    auto it = names.find(name);
    if (it == names.end())
      throw SolverError(path + ":" + std::to_string(lineno) + ": unknown variable '" + name + "'");
    sol.values[static_cast<std::size_t>(it->second)] = value;
    seen[static_cast<std::size_t>(it->second)] = true;
  }
  for (bool s : seen)
    if (!s) ++sol.import_warnings;
  sol.status = SolveStatus::Optimal;
  double obj = 0.0;
  model.objective_of(sol.values, &obj);
  sol.objective = obj;
  return sol;
}

namespace {

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
  std::size_t pos;
  while ((pos = tmpl.find(key)) != std::string::npos) tmpl.replace(pos, key.size(), value);
  return tmpl;
}

}  // namespace

LpSolution solve_external(const IlpModel& model, const std::string& cmd_template, bool relax) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path();
  std::string stem = "gdp_" + std::to_string(static_cast<long>(::getpid())) + "_" +
                     std::to_string(counter++);
  fs::path lpfile = dir / (stem + ".lp");
  fs::path solfile = dir / (stem + ".sol");

  if (relax)
    export_lp_file(lp_relaxation(model), lpfile.string());
  else
    export_lp_file(model, lpfile.string());

  std::string cmd = substitute(cmd_template, "{lpfile}", lpfile.string());
  cmd = substitute(cmd, "{solfile}", solfile.string());
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    fs::remove(lpfile);
    throw SolverError("external solver command failed (exit " + std::to_string(rc) + "): " + cmd);
  }
  LpSolution sol = import_solution(model, solfile.string());
  fs::remove(lpfile);
  fs::remove(solfile);
  return sol;
}

}  // namespace gdp
