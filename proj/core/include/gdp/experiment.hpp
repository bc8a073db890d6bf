#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdp/generator.hpp"
#include "gdp/ilp.hpp"

namespace gdp {

enum class Variant { DpSS, DpVS, AdpSS, Swp, Resilience };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

/// Builds the adapter instance for one variant on one database. The target
/// for dpss/dpvs is the view tuple with the median witness count; k for
/// adpss defaults to ceil(k_fraction * |view|).
GdpInstance instance_for_variant(Variant variant, const Database& db, const Query& q,
                                 double k_fraction = 0.1,
                                 std::optional<std::int64_t> k_override = std::nullopt);

struct ExperimentCell {
  std::string name;
  Variant variant = Variant::Swp;
  std::string query;  // builtin name or file path
  std::vector<BuildMode> modes;
  std::vector<std::size_t> sizes;  // tuple-count ladder
  int repetitions = 3;
  std::uint64_t seed = 1;
  Semantics semantics = Semantics::Set;
  std::int64_t max_domain = 1000;
  std::int64_t max_bag = 10;
  double k_fraction = 0.1;
  bool solve_lp_too = true;  // record the relaxation objective and gap
  std::uint64_t max_nodes = 1ull << 22;  // per-run branch and bound budget
  double time_limit_s = 0.0;             // per-run wall clock budget, 0 = none
};

struct ExperimentConfig {
  std::vector<ExperimentCell> cells;
  std::string out_csv;
  std::string out_summary;
  int threads = 1;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct RunRecord {
  std::string instance_id;
  std::string mode;
  std::string variant;
  std::size_t n_tuples = 0;
  std::size_t n_witnesses = 0;
  double lp_objective = 0.0;
  double ilp_objective = 0.0;
  double enumerate_ms = 0.0;
  double build_ms = 0.0;
  double solve_ms = 0.0;
  double gap = 0.0;
  bool lp_integral = false;
  std::uint64_t node_count = 0;
  std::string error;  // empty on success

  std::string cell;
  std::size_t size = 0;
  int repetition = 0;
};

extern const char* kRunRecordHeader;
std::string run_record_csv(const RunRecord& r);

/// Runs every (cell, size, repetition, mode) combination in a worker pool,
/// writes one CSV row per run plus a JSON summary with per-bucket medians.
/// Per-run failures are recorded in the row and the run continues.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

}  // namespace gdp
