#include <benchmark/benchmark.h>

#include <random>

#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"

using namespace swhs;

namespace {

GridSpec spec_for(int radial, int height, GridMode mode) {
    GridSpec spec;
    spec.n_radial = radial;
    spec.n_height = height;
    spec.n_angular = 16;
    spec.mode = mode;
    return spec;
}

void fill_random(std::vector<double>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& x : v) x = dist(rng);
}

void bm_table_build(benchmark::State& state, GridMode mode) {
    GridSpec spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                             mode);
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    KernelParams kp{0.0, 1.0};
    for (auto _ : state) {
        KernelTable table = KernelTable::build(bg, hg, kp);
        benchmark::DoNotOptimize(table.at(0, 0, 0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hg.size()) *
                            bg.radial_count());
}

void bm_apply_V(benchmark::State& state, GridMode mode) {
    GridSpec spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                             mode);
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    InequalityParams ip;
    OpParams op = OpParams::from(ip);
    KernelTable table = KernelTable::build(bg, hg, op.kp);
    BoundaryField f = make_field(bg);
    fill_random(f.value, 7);
    for (auto _ : state) {
        HalfField vf = apply_V(f, hg, op, table);
        benchmark::DoNotOptimize(vf.value.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hg.size()) *
                            bg.radial_count());
}

void bm_apply_W(benchmark::State& state) {
    GridSpec spec = spec_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                             GridMode::Reduced);
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    InequalityParams ip;
    OpParams op = OpParams::from(ip);
    KernelTable table = KernelTable::build(bg, hg, op.kp);
    HalfField g = make_field(hg);
    fill_random(g.value, 11);
    for (auto _ : state) {
        BoundaryField wg = apply_W(g, bg, op, table);
        benchmark::DoNotOptimize(wg.value.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hg.size()) *
                            bg.radial_count());
}

void bm_duality_gap(benchmark::State& state) {
    GridSpec spec = spec_for(32, 32, GridMode::Reduced);
    BoundaryGrid bg = build_boundary_grid(spec);
    HalfGrid hg = build_half_grid(spec);
    InequalityParams ip;
    OpParams op = OpParams::from(ip);
    KernelTable table = KernelTable::build(bg, hg, op.kp);
    BoundaryField f = make_field(bg);
    HalfField g = make_field(hg);
    fill_random(f.value, 13);
    fill_random(g.value, 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(duality_gap(f, g, op, table));
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_table_build, reduced, GridMode::Reduced)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(bm_table_build, full, GridMode::Full)->Arg(32);
BENCHMARK_CAPTURE(bm_apply_V, reduced, GridMode::Reduced)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bm_apply_V, full, GridMode::Full)->Arg(32);
BENCHMARK(bm_apply_W)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_duality_gap);

BENCHMARK_MAIN();
