#pragma once

// Shared fixtures for the test suites: a cluttered reference scene, the
// dataset-shaped rig, a brute-force kNN oracle, and a file hash.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "panodepth/completion.hpp"
#include "panodepth/synthetic.hpp"

namespace testutil {

/// Closed cylindrical "room" with a ground plane and a few objects, so every
/// ray hits something and depth varies across the band.
inline panodepth::Scene make_room_scene() {
    panodepth::Scene scene;
    scene.planes.push_back({-1.6});
    scene.cylinders.push_back({0.0, 0.0, -2.0, 6.0, 8.0});      // enclosing walls
    scene.spheres.push_back({{2.5, 0.8, -0.1}, 0.6});
    scene.boxes.push_back({{-2.2, 1.8, -0.85}, {1.0, 1.2, 1.5}});
    scene.cylinders.push_back({1.2, -2.4, -1.6, 0.8, 0.45});    // pillar
    return scene;
}

inline panodepth::SimRig make_rig(int width = 1920, int height = 512) {
    panodepth::SimRig rig;
    rig.camera_raster = {width, height, 48.0, 144.0};
    return rig;  // geometry and lidar keep the reference constants
}

/// Exhaustive kNN ordered by (distance, insertion index); the reference the
/// accelerated index must match exactly.
inline std::vector<panodepth::SphericalKnnIndex::Neighbor> knn_brute_force(
    const std::vector<panodepth::SphericalPoint>& points, double theta_deg, double phi_deg,
    int k) {
    std::vector<panodepth::SphericalKnnIndex::Neighbor> all;
    all.reserve(points.size());
    for (int i = 0; i < int(points.size()); ++i)
        all.push_back({panodepth::angular_distance(theta_deg, phi_deg, points[i].theta_deg,
                                                   points[i].phi_deg),
                       points[i].r, i});
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.distance_deg != b.distance_deg ? a.distance_deg < b.distance_deg
                                                : a.index < b.index;
    });
    all.resize(size_t(k));
    return all;
}

inline uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= uint8_t(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace testutil
