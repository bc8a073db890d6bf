#include "gdp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gdp/oracle.hpp"
#include "gdp/solver.hpp"
#include "gdp/witness.hpp"
#include "json.hpp"

using nlohmann::json;

namespace gdp {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::DpSS: return "dpss";
    case Variant::DpVS: return "dpvs";
    case Variant::AdpSS: return "adpss";
    case Variant::Swp: return "swp";
    case Variant::Resilience: return "res";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "dpss") return Variant::DpSS;
  if (s == "dpvs") return Variant::DpVS;
  if (s == "adpss") return Variant::AdpSS;
  if (s == "swp") return Variant::Swp;
  if (s == "res") return Variant::Resilience;
  throw std::invalid_argument("unknown variant '" + s + "' (dpss|dpvs|adpss|swp|res)");
}

namespace {

// Deterministic target choice: the view tuple with the median witness count,
// ties by tuple value.
std::vector<Value> median_witness_target(const ProvenanceIndex& prov) {
  std::vector<std::pair<std::size_t, std::size_t>> counts;  // (witness count, view id)
  for (std::size_t vi = 0; vi < prov.view_tuples.size(); ++vi)
    counts.emplace_back(prov.view_witnesses[vi].size(), vi);
  std::sort(counts.begin(), counts.end());
  return prov.view_tuples[counts[(counts.size() - 1) / 2].second];
}

}  // namespace

GdpInstance instance_for_variant(Variant variant, const Database& db, const Query& q,
                                 double k_fraction, std::optional<std::int64_t> k_override) {
  switch (variant) {
    case Variant::Swp:
      return make_swp(db, q);
    case Variant::Resilience:
      return make_resilience(db, q.is_boolean() ? q : existential_query(q));
    case Variant::DpSS:
    case Variant::DpVS: {
      ProvenanceIndex prov = enumerate_witnesses(db, q);
      if (prov.view_tuples.empty())
        throw InstanceError("view of '" + q.name + "' is empty, no target to delete");
      auto target = median_witness_target(prov);
      return variant == Variant::DpSS ? make_dpss(db, q, target) : make_dpvs(db, q, target);
    }
    case Variant::AdpSS: {
      auto view = static_cast<std::int64_t>(evaluate_count(db, q));
      if (view == 0) throw InstanceError("view of '" + q.name + "' is empty");
      std::int64_t k = k_override.value_or(
          static_cast<std::int64_t>(std::ceil(k_fraction * static_cast<double>(view))));
      k = std::max<std::int64_t>(1, std::min(k, view));
      return make_adpss(db, q, k);
    }
  }
  throw std::invalid_argument("bad variant");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config '" + path + "'");
  json j;
  in >> j;
  ExperimentConfig cfg;
  cfg.out_csv = j.value("out_csv", "results.csv");
  cfg.out_summary = j.value("out_summary", "summary.json");
  cfg.threads = j.value("threads", 1);
  for (const auto& c : j.at("cells")) {
    ExperimentCell cell;
    cell.name = c.at("name").get<std::string>();
    cell.variant = parse_variant(c.at("variant").get<std::string>());
    cell.query = c.at("query").get<std::string>();
    for (const auto& m : c.at("modes")) cell.modes.push_back(parse_mode(m.get<std::string>()));
    for (const auto& s : c.at("sizes")) cell.sizes.push_back(s.get<std::size_t>());
    cell.repetitions = c.value("repetitions", 3);
    cell.seed = c.value("seed", 1ull);
    cell.semantics = parse_semantics(c.value("semantics", "set"));
    cell.max_domain = c.value("max_domain", 1000);
    cell.max_bag = c.value("max_bag", 10);
    cell.k_fraction = c.value("k_fraction", 0.1);
    cell.solve_lp_too = c.value("solve_lp", true);
    cell.max_nodes = c.value("max_nodes", 1ull << 22);
    cell.time_limit_s = c.value("time_limit_s", 0.0);
    cfg.cells.push_back(std::move(cell));
  }
  return cfg;
}

const char* kRunRecordHeader =
    "instance_id,mode,variant,n_tuples,n_witnesses,lp_objective,ilp_objective,"
    "enumerate_ms,build_ms,solve_ms,gap,lp_integral,node_count,error";

std::string run_record_csv(const RunRecord& r) {
  std::ostringstream out;
  out << r.instance_id << ',' << r.mode << ',' << r.variant << ',' << r.n_tuples << ','
      << r.n_witnesses << ',' << r.lp_objective << ',' << r.ilp_objective << ',' << r.enumerate_ms
      << ',' << r.build_ms << ',' << r.solve_ms << ',' << r.gap << ','
      << (r.lp_integral ? "true" : "false") << ',' << r.node_count << ',' << r.error;
  return out.str();
}

namespace {

Query cell_query(const ExperimentCell& cell) {
  if (std::filesystem::exists(cell.query)) return parse_query_file(cell.query);
  return builtin_query(cell.query);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
  return dt.count();
}

struct Task {
  const ExperimentCell* cell;
  std::size_t size;
  int repetition;
  BuildMode mode;
  std::uint64_t seed;
};

RunRecord run_task(const Task& task) {
  const ExperimentCell& cell = *task.cell;
  RunRecord rec;
  rec.cell = cell.name;
  rec.size = task.size;
  rec.repetition = task.repetition;
  rec.instance_id = cell.name + "/n" + std::to_string(task.size) + "/r" +
                    std::to_string(task.repetition);
  rec.mode = mode_name(task.mode);
  rec.variant = variant_name(cell.variant);
  rec.n_tuples = task.size;
  try {
    Query q = cell_query(cell);
    GenProfile profile{q, task.size, cell.max_domain, cell.semantics, cell.max_bag, task.seed};
    Database db = gen_random(profile);

    auto t0 = std::chrono::steady_clock::now();
    GdpInstance inst = instance_for_variant(cell.variant, db, q, cell.k_fraction);
    rec.enumerate_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    IlpModel model = build(inst, task.mode);
    rec.build_ms = ms_since(t0);
    for (const auto& ctx : model.views) rec.n_witnesses += ctx.prov.witnesses.size();

    SolverOptions opts;
    opts.max_nodes = cell.max_nodes;
    opts.time_limit_s = cell.time_limit_s;
    t0 = std::chrono::steady_clock::now();
    MipResult mip = solve_ilp(model, opts);
    rec.solve_ms = ms_since(t0);
    rec.node_count = mip.node_count;
    if (mip.status != SolveStatus::Optimal) {
      rec.error = "ilp status " + status_name(mip.status);
      return rec;
    }
    rec.ilp_objective = mip.objective;

    if (cell.solve_lp_too) {
      LpSolution lp = solve_lp(lp_relaxation(model));
      if (lp.status != SolveStatus::Optimal) {
        rec.error = "lp status " + status_name(lp.status);
        return rec;
      }
      rec.lp_objective = lp.objective;
      rec.gap = rec.ilp_objective - rec.lp_objective;
      rec.lp_integral = lp.is_integral();
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  std::vector<Task> tasks;
  for (const auto& cell : config.cells) {
    for (std::size_t si = 0; si < cell.sizes.size(); ++si)
      for (int rep = 0; rep < cell.repetitions; ++rep) {
        std::uint64_t seed = cell.seed + 1000003ull * si + 7919ull * static_cast<std::uint64_t>(rep);
        for (BuildMode mode : cell.modes)
          tasks.push_back(Task{&cell, cell.sizes[si], rep, mode, seed});
      }
  }

  std::vector<RunRecord> records(tasks.size());
  if (config.threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) records[i] = run_task(tasks[i]);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&]() {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= tasks.size()) return;
          i = next++;
        }
        records[i] = run_task(tasks[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // deterministic output order regardless of scheduling
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  if (!config.out_csv.empty()) {
    std::ofstream csv(config.out_csv);
    csv << kRunRecordHeader << '\n';
    for (std::size_t i : order) csv << run_record_csv(records[i]) << '\n';
  }

  if (!config.out_summary.empty()) {
    // per (cell, mode, size) medians
    struct Bucket {
      std::vector<double> solve_ms;
      std::vector<double> total_ms;
      int runs = 0, gap_zero = 0, root_solves = 0, errors = 0;
    };
    std::map<std::tuple<std::string, std::string, std::size_t>, Bucket> buckets;
    for (const auto& r : records) {
      auto& b = buckets[{r.cell, r.mode, r.size}];
      ++b.runs;
      if (!r.error.empty()) {
        ++b.errors;
        continue;
      }
      b.solve_ms.push_back(r.solve_ms);
      b.total_ms.push_back(r.enumerate_ms + r.build_ms + r.solve_ms);
      if (std::fabs(r.gap) <= 1e-6) ++b.gap_zero;
      if (r.node_count == 1) ++b.root_solves;
    }
    auto median = [](std::vector<double> v) {
      if (v.empty()) return 0.0;
      std::sort(v.begin(), v.end());
      return v[(v.size() - 1) / 2];
    };
    json sj;
    sj["buckets"] = json::array();
    for (auto& [key, b] : buckets) {
      json bj;
      bj["cell"] = std::get<0>(key);
      bj["mode"] = std::get<1>(key);
      bj["size"] = std::get<2>(key);
      bj["runs"] = b.runs;
      bj["errors"] = b.errors;
      bj["median_solve_ms"] = median(b.solve_ms);
      bj["median_total_ms"] = median(b.total_ms);
      bj["gap_zero"] = b.gap_zero;
      bj["root_solves"] = b.root_solves;
      sj["buckets"].push_back(bj);
    }
    std::ofstream out(config.out_summary);
    out << sj.dump(2) << '\n';
  }
  return records;
}

}  // namespace gdp
