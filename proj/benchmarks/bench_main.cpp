#include <benchmark/benchmark.h>

#include "sausage_lab/geometry.hpp"
#include "sausage_lab/rng.hpp"
#include "sausage_lab/sausage.hpp"
#include "sausage_lab/sde.hpp"

using namespace sausage_lab;

namespace {

Path tg_path(std::size_t steps, double eps = 0.25) {
    IntegratorConfig cfg;
    cfg.epsilon = eps;
    cfg.n_steps = steps;
    cfg.seed = 42;
    return integrate(VelocityField::taylor_green(), cfg);
}

}  // namespace

static void BM_Integrate(benchmark::State& state) {
    const auto field = VelocityField::taylor_green();
    IntegratorConfig cfg;
    cfg.n_steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(field, cfg).data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Integrate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_PhiloxNormals(benchmark::State& state) {
    const rng::Philox gen(7, rng::Stream::PathNoise);
    std::uint64_t n = 0;
    for (auto _ : state) benchmark::DoNotOptimize(gen.normals(n++));
    state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_PhiloxNormals);

// Membership queries at uniform points of the bounding cube.
static void BM_Membership(benchmark::State& state) {
    const auto path = tg_path(static_cast<std::size_t>(state.range(0)));
    const auto K = CrossSection::ball(1.0);
    const PointIndex index(path.data(), 3, K);
    const auto cube = bounding_cube(path, K);
    const auto offsets = sample_offsets(4096, 3, 3);
    std::size_t j = 0;
    double q[3];
    for (auto _ : state) {
        for (int k = 0; k < 3; ++k) q[k] = cube.center[k] + cube.side * offsets[3 * j + k];
        benchmark::DoNotOptimize(index.covers({q, 3}));
        j = (j + 1) % 4096;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Membership)->Arg(1000)->Arg(100000);

static void BM_EstimateVolume(benchmark::State& state) {
    const auto path = tg_path(static_cast<std::size_t>(state.range(0)));
    const auto K = CrossSection::ball(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_volume(path, K, 4, static_cast<std::size_t>(state.range(1)), 5).v_hat);
    }
}
BENCHMARK(BM_EstimateVolume)->Args({1000, 1000})->Args({100000, 1000})->Unit(benchmark::kMillisecond);

static void BM_VoxelOracle(benchmark::State& state) {
    const auto path = tg_path(1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(voxel_oracle_volume(path, CrossSection::ball(1.0), static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_VoxelOracle)->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
