// Serial reference kernels against their parallel counterparts.

#include <benchmark/benchmark.h>

#include "binseq/experiments.hpp"
#include "binseq/oracle.hpp"
#include "binseq/rounding.hpp"
#include "binseq/sdp.hpp"
#include "binseq/spectral.hpp"

namespace {

using namespace binseq;

DesignProblem design_problem(std::int64_t trials) {
  ExperimentConfig cfg = default_experiment_config(ExperimentKind::RatioHistogram);
  cfg.problem.trials = trials;
  return cfg.problem;
}

const SdpSolution& design_solution() {
  static const SdpSolution sol = solve_relaxation(design_problem(1));
  return sol;
}

void BM_RunDesignSerial(benchmark::State& state) {
  const DesignProblem p = design_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_design_serial(p, design_solution(), ScoreKind::MessagePower));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunDesignSerial)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_RunDesignParallel(benchmark::State& state) {
  const DesignProblem p = design_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_design(p, design_solution(), ScoreKind::MessagePower));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunDesignParallel)->Arg(4096)->Unit(benchmark::kMillisecond);

DesignProblem oracle_problem(int n) {
  return DesignProblem{n, BandSpec{1, 2}, BandSpec{4, 5}, 4.0, 1, 0};
}

void BM_OracleSerial(benchmark::State& state) {
  const DesignProblem p = oracle_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_search_serial(p));
}
BENCHMARK(BM_OracleSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_OracleGrayParallel(benchmark::State& state) {
  const DesignProblem p = oracle_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_search(p));
}
BENCHMARK(BM_OracleGrayParallel)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EighJacobi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = design_solution().matrix.topLeftCorner(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(m));
}
BENCHMARK(BM_EighJacobi)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EighFast(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = design_solution().matrix.topLeftCorner(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(eigh_fast(m));
}
BENCHMARK(BM_EighFast)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
