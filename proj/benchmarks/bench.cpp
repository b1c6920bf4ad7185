#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gapforge/assemble.hpp"
#include "gapforge/eigensolve.hpp"
#include "gapforge/gap_algebra.hpp"
#include "gapforge/mesh.hpp"

using namespace gapforge;

namespace {

alg::TargetGaps make_targets(int m) {
    alg::TargetGaps t;
    double a = 1.0;
    for (int j = 0; j < m; ++j) {
        t.intervals.emplace_back(a, a * 1.4);
        a *= 2.0;
    }
    return t;
}

geom::CellSpec reference_square_cell() {
    geom::CellSpec cell;
    cell.inclusions = {geom::InclusionShape::rect(0.5, 0.5, 0.25, 0.25)};
    cell.strengths = {0.125};
    return cell;
}

void bm_gap_roots(benchmark::State& state) {
    const auto params = alg::inverse_design(make_targets(static_cast<int>(state.range(0))));
    const auto coeffs = alg::SecularCoefficients::from_design(params);
    for (auto _ : state) benchmark::DoNotOptimize(alg::gap_roots(coeffs));
}

void bm_assemble(benchmark::State& state) {
    const auto cell = reference_square_cell();
    const int n = static_cast<int>(state.range(0));
    const auto mesh = fem::build_mesh(cell, n);
    const auto dofs = fem::build_dof_map(mesh);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fem::assemble(mesh, dofs, cell, 0.25, fem::BCMode::quasi(1.0, 2.0)));
    }
}

void bm_solve_ground_states(benchmark::State& state) {
    const auto cell = reference_square_cell();
    const int n = static_cast<int>(state.range(0));
    const auto mesh = fem::build_mesh(cell, n);
    const auto dofs = fem::build_dof_map(mesh);
    const auto sys = fem::assemble(mesh, dofs, cell, 0.25, fem::BCMode::quasi(1.0, 2.0));
    fem::EigenSolveOptions opts;
    for (auto _ : state) benchmark::DoNotOptimize(fem::solve_smallest(sys, 3, opts));
}

} // namespace

BENCHMARK(bm_gap_roots)->Arg(1)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(bm_assemble)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(bm_solve_ground_states)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
