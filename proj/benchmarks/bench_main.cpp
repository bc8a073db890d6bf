#include <benchmark/benchmark.h>

#include "gdp/experiment.hpp"
#include "gdp/oracle.hpp"
#include "gdp/solver.hpp"
#include "gdp/witness.hpp"

using namespace gdp;

namespace {

Database star_db(std::size_t n, std::int64_t domain, Semantics sem = Semantics::Set) {
  GenProfile p{builtin_query("q3star"), n, domain, sem, 10, 7};
  return gen_random(p);
}

void BM_enumerate_witnesses(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Database db = star_db(n, std::max<std::int64_t>(8, static_cast<std::int64_t>(n) / 2));
  Query q = builtin_query("q3star");
  for (auto _ : state) {
    ProvenanceIndex prov = enumerate_witnesses(db, q);
    benchmark::DoNotOptimize(prov.witnesses.size());
  }
  state.counters["witnesses"] =
      static_cast<double>(enumerate_witnesses(db, q).witnesses.size());
}
BENCHMARK(BM_enumerate_witnesses)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_build_smoothed(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Database db = star_db(n, std::max<std::int64_t>(8, static_cast<std::int64_t>(n) / 2));
  GdpInstance inst = make_swp(db, builtin_query("q3star"));
  for (auto _ : state) {
    IlpModel model = build(inst, BuildMode::Smoothed);
    benchmark::DoNotOptimize(model.constraints.size());
  }
}
BENCHMARK(BM_build_smoothed)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_lp_solve_smoothed(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Database db = star_db(n, std::max<std::int64_t>(8, static_cast<std::int64_t>(n) / 2));
  IlpModel model =
      lp_relaxation(build(make_swp(db, builtin_query("q3star")), BuildMode::Smoothed));
  for (auto _ : state) {
    LpSolution lp = solve_lp(model);
    benchmark::DoNotOptimize(lp.objective);
  }
}
BENCHMARK(BM_lp_solve_smoothed)->Arg(100)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ilp_solve_modes(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  BuildMode mode = state.range(1) ? BuildMode::Smoothed : BuildMode::Naive;
  Database db = star_db(n, std::max<std::int64_t>(4, static_cast<std::int64_t>(n)));
  IlpModel model = build(make_swp(db, builtin_query("q3star")), mode);
  for (auto _ : state) {
    MipResult r = solve_ilp(model);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_ilp_solve_modes)
    ->Args({32, 0})
    ->Args({32, 1})
    ->Args({64, 0})
    ->Args({64, 1})
    ->Unit(benchmark::kMillisecond);

void BM_oracle(benchmark::State& state) {
  Database db = star_db(static_cast<std::size_t>(state.range(0)), 3);
  GdpInstance inst = make_swp(db, builtin_query("q3star"));
  for (auto _ : state) {
    OracleResult r = brute_force(inst);
    benchmark::DoNotOptimize(r.optimum);
  }
}
BENCHMARK(BM_oracle)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
