#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "panodepth/geometry.hpp"
#include "panodepth/random.hpp"

using namespace panodepth;

namespace {

std::vector<Vec3> random_points(size_t n) {
    std::mt19937_64 rng(1);
    std::vector<Vec3> pts(n);
    for (auto& p : pts)
        p = {uniform_double(rng) * 20 - 10, uniform_double(rng) * 20 - 10,
             uniform_double(rng) * 20 - 10};
    return pts;
}

}  // namespace

static void BM_CartToSpherical(benchmark::State& state) {
    const auto pts = random_points(1024);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cart_to_spherical(pts[i++ & 1023]));
    }
}
BENCHMARK(BM_CartToSpherical);

static void BM_SphericalToCart(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::vector<SphericalPoint> sps(1024);
    for (auto& sp : sps)
        sp = {1.0 + uniform_double(rng) * 10, uniform_double(rng) * 180,
              uniform_double(rng) * 360 - 180};
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(spherical_to_cart(sps[i++ & 1023]));
    }
}
BENCHMARK(BM_SphericalToCart);

static void BM_DepthToDisparity(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::vector<double> rs(1024);
    for (auto& r : rs) r = 0.3 + uniform_double(rng) * 100;
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(depth_to_disparity(rs[i++ & 1023], 90.0, 0.191));
    }
}
BENCHMARK(BM_DepthToDisparity);

static void BM_DisparityToDepth(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::vector<double> ds(1024);
    for (auto& d : ds) d = 0.05 + uniform_double(rng) * 20;
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(disparity_to_depth(ds[i++ & 1023], 90.0, 0.191));
    }
}
BENCHMARK(BM_DisparityToDepth);

static void BM_CircularPad(benchmark::State& state) {
    Image<float> img(int(state.range(0)), 512);
    for (auto _ : state) {
        benchmark::DoNotOptimize(circular_pad(img, 64));
    }
    state.SetBytesProcessed(state.iterations() * img.data.size() * sizeof(float));
}
BENCHMARK(BM_CircularPad)->Arg(1920);

static void BM_PolarAngleMap(benchmark::State& state) {
    const EquirectGeometry geom{1920, 512, 48.0, 144.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(polar_angle_map(geom));
    }
}
BENCHMARK(BM_PolarAngleMap);

BENCHMARK_MAIN();
