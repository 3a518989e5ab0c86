#include <benchmark/benchmark.h>

#include "panodepth/synthetic.hpp"

using namespace panodepth;

namespace {

Scene bench_scene() {
    Scene scene;
    scene.planes.push_back({-1.6});
    scene.cylinders.push_back({0.0, 0.0, -2.0, 6.0, 8.0});
    scene.spheres.push_back({{2.5, 0.8, -0.1}, 0.6});
    scene.boxes.push_back({{-2.2, 1.8, -0.85}, {1.0, 1.2, 1.5}});
    return scene;
}

SimRig bench_rig() {
    SimRig rig;
    rig.camera_raster = {1920, 512, 48.0, 144.0};
    return rig;
}

}  // namespace

static void BM_Raycast(benchmark::State& state) {
    const Scene scene = bench_scene();
    const Vec3 dir = spherical_to_cart({1.0, 95.0, 30.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(raycast({0, 0, 0}, dir, scene));
    }
}
BENCHMARK(BM_Raycast);

static void BM_RenderLidar(benchmark::State& state) {
    const Scene scene = bench_scene();
    const SimRig rig = bench_rig();
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_lidar(scene, rig, {0, 0, 0}));
    }
    state.SetItemsProcessed(state.iterations() * rig.lidar.n_beams * rig.lidar.n_channels_h);
}
BENCHMARK(BM_RenderLidar)->Unit(benchmark::kMillisecond);

static void BM_RenderDepthMap(benchmark::State& state) {
    const Scene scene = bench_scene();
    const EquirectGeometry geom{int(state.range(0)), int(state.range(0)) * 4 / 15, 48.0, 144.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_depth_map(scene, {0, 0, 0}, geom));
    }
    state.SetItemsProcessed(state.iterations() * geom.width * geom.height);
}
BENCHMARK(BM_RenderDepthMap)->Unit(benchmark::kMillisecond)->Arg(480)->Arg(1920);

BENCHMARK_MAIN();
