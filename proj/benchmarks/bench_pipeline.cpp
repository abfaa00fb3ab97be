// Microbenchmarks for the stages of the solve pipeline. Run manually:
//   ./dowg_bench --benchmark_min_time=0.5
#include <benchmark/benchmark.h>

#include "dowg/assembly.hpp"
#include "dowg/basis.hpp"
#include "dowg/problem.hpp"
#include "dowg/quadrature.hpp"
#include "dowg/reference.hpp"

using namespace dowg;

namespace {

const ProblemSpec& example1() {
  static const ProblemSpec p = builtin_example(1);
  return p;
}

const ProblemSpec& example2() {
  static const ProblemSpec p = builtin_example(2);
  return p;
}

const CellTables& tables2() {
  static const CellTables t = build_tables(example2(), make_fine_grid(14, 3));
  return t;
}

void BM_build_tables(benchmark::State& state) {
  const FineGrid grid = make_fine_grid(14, 3);
  for (auto _ : state) {
    CellTables t = build_tables(example1(), grid);
    benchmark::DoNotOptimize(t.PinvA.back());
  }
}
BENCHMARK(BM_build_tables)->Unit(benchmark::kMillisecond);

void BM_build_space(benchmark::State& state) {
  for (auto _ : state) {
    MultiscaleSpace sp = build_space(example2(), tables2(), 6);
    benchmark::DoNotOptimize(sp.basis.data());
  }
}
BENCHMARK(BM_build_space)->Unit(benchmark::kMillisecond);

void BM_assemble(benchmark::State& state) {
  const MultiscaleSpace sp = build_space(example2(), tables2(), 6);
  for (auto _ : state) {
    Eigen::MatrixXd A = assemble_stiffness(sp, tables2());
    Eigen::VectorXd b = assemble_load(sp, tables2());
    benchmark::DoNotOptimize(A.data());
    benchmark::DoNotOptimize(b.data());
  }
}
BENCHMARK(BM_assemble)->Unit(benchmark::kMillisecond);

void BM_solve_spd(benchmark::State& state) {
  const MultiscaleSpace sp = build_space(example2(), tables2(), 6);
  const Eigen::MatrixXd A = assemble_stiffness(sp, tables2());
  const Eigen::VectorXd b = assemble_load(sp, tables2());
  for (auto _ : state) {
    Eigen::VectorXd d = solve_spd(A, b);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_solve_spd)->Unit(benchmark::kMillisecond);

void BM_condition_number(benchmark::State& state) {
  const MultiscaleSpace sp = build_space(example2(), tables2(), 6);
  const Eigen::MatrixXd A = assemble_stiffness(sp, tables2());
  for (auto _ : state) {
    double kappa = condition_number(A);
    benchmark::DoNotOptimize(kappa);
  }
}
BENCHMARK(BM_condition_number)->Unit(benchmark::kMillisecond);

void BM_sample_fields(benchmark::State& state) {
  const MultiscaleSpace sp = build_space(example2(), tables2(), 6);
  const Eigen::MatrixXd A = assemble_stiffness(sp, tables2());
  const Eigen::VectorXd b = assemble_load(sp, tables2());
  const Eigen::VectorXd d = solve_spd(A, b);
  for (auto _ : state) {
    SampledFields fields = sample_multiscale(example2(), sp, tables2(), d);
    benchmark::DoNotOptimize(fields.u.data());
  }
}
BENCHMARK(BM_sample_fields)->Unit(benchmark::kMillisecond);

void BM_generic_reference(benchmark::State& state) {
  const FineGrid eval = make_fine_grid(12, 3);
  for (auto _ : state) {
    ReferenceSolution ref = generic_reference(example1(), 16, eval);
    benchmark::DoNotOptimize(ref.fields.u.data());
  }
}
BENCHMARK(BM_generic_reference)->Unit(benchmark::kMillisecond);

void BM_standard_fem(benchmark::State& state) {
  for (auto _ : state) {
    FemSolution fem = solve_standard_fem(example2(), tables2(), 7);
    benchmark::DoNotOptimize(fem.fields.u.data());
  }
}
BENCHMARK(BM_standard_fem)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
