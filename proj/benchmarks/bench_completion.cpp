#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "panodepth/completion.hpp"
#include "panodepth/random.hpp"

using namespace panodepth;

namespace {

std::vector<SphericalPoint> band_cloud(size_t n) {
    std::mt19937_64 rng(7);
    std::vector<SphericalPoint> pts(n);
    for (auto& p : pts)
        p = {0.5 + uniform_double(rng) * 10, 68.8 + uniform_double(rng) * 42.4,
             uniform_double(rng) * 360 - 180};
    return pts;
}

}  // namespace

static void BM_IndexBuild(benchmark::State& state) {
    const auto pts = band_cloud(size_t(state.range(0)));
    for (auto _ : state) {
        SphericalKnnIndex index(pts);
        benchmark::DoNotOptimize(index.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(65'536)->Arg(589'824);

static void BM_KnnQuery(benchmark::State& state) {
    const auto pts = band_cloud(589'824);  // nine aggregated scans
    const SphericalKnnIndex index(pts);
    std::mt19937_64 rng(8);
    std::vector<QueryPoint> queries(4096);
    for (auto& q : queries)
        q = {68.8 + uniform_double(rng) * 42.4, uniform_double(rng) * 360 - 180};
    size_t i = 0;
    for (auto _ : state) {
        const auto& q = queries[i++ & 4095];
        benchmark::DoNotOptimize(index.query(q.theta_deg, q.phi_deg, int(state.range(0))));
    }
}
BENCHMARK(BM_KnnQuery)->Arg(4)->Arg(17);

static void BM_KnnBruteForceQuery(benchmark::State& state) {
    const auto pts = band_cloud(size_t(state.range(0)));
    std::mt19937_64 rng(9);
    for (auto _ : state) {
        const double theta = 68.8 + uniform_double(rng) * 42.4;
        const double phi = uniform_double(rng) * 360 - 180;
        // linear scan for scale comparison with the bucket index
        double best = 1e9;
        for (const auto& p : pts)
            best = std::fmin(best, angular_distance(theta, phi, p.theta_deg, p.phi_deg));
        benchmark::DoNotOptimize(best);
    }
}
BENCHMARK(BM_KnnBruteForceQuery)->Arg(65'536);

static void BM_GenerateQueryGrid(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_query_grid(state.range(0), 68.8));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateQueryGrid)->Arg(200'000)->Arg(2'000'000);

static void BM_CompleteDepthMap(benchmark::State& state) {
    PointCloud cloud;
    cloud.points = band_cloud(196'608);
    const EquirectGeometry geom{480, 128, 48.0, 144.0};
    DepthMap sparse(geom.width, geom.height, MapKind::depth);
    CompletionParams params;
    params.n_grid = state.range(0);
    params.t_ood_deg = 0.75;
    for (auto _ : state) {
        benchmark::DoNotOptimize(complete_depth_map(cloud, sparse, geom, params));
    }
}
BENCHMARK(BM_CompleteDepthMap)->Unit(benchmark::kMillisecond)->Arg(50'000)->Arg(200'000);

BENCHMARK_MAIN();
