#pragma once

// Analytic scene simulator: exact LiDAR clouds, equirectangular depth and
// disparity maps, and calibration correspondences for a known rig. Every
// intersection is closed-form, so renders double as test oracles.

#include <cstdint>
#include <optional>
#include <vector>

#include "panodepth/calibration.hpp"
#include "panodepth/completion.hpp"
#include "panodepth/geometry.hpp"
#include "panodepth/raster.hpp"

namespace panodepth {

struct GroundPlane {
    double height = 0.0;  // plane z = height
};

struct Box {
    Vec3 center;
    Vec3 size;  // full extents
};

struct VerticalCylinder {
    double cx = 0.0, cy = 0.0;
    double z_min = 0.0, z_max = 1.0;
    double radius = 1.0;
};

struct Sphere {
    Vec3 center;
    double radius = 1.0;
};

struct Scene {
    std::vector<GroundPlane> planes;
    std::vector<Box> boxes;
    std::vector<VerticalCylinder> cylinders;
    std::vector<Sphere> spheres;

    bool empty() const {
        return planes.empty() && boxes.empty() && cylinders.empty() && spheres.empty();
    }
};

/// Simulated stack: bottom camera at the rig origin, top camera `baseline`
/// above it, LiDAR `lidar_offset` below it, all axes aligned.
struct SimRig {
    RigGeometry geometry;            // baseline + LiDAR drop
    RigConfig lidar;                 // beam layout
    EquirectGeometry camera_raster;  // bottom-camera equirectangular raster

    Vec3 bottom_camera_center() const { return {0, 0, 0}; }
    Vec3 top_camera_center() const { return {0, 0, geometry.baseline_m}; }
    Vec3 lidar_center() const { return {0, 0, -geometry.lidar_offset_m}; }

    /// LiDAR-frame -> bottom-camera-frame transform implied by the stack.
    Extrinsics true_extrinsics() const { return {{0, 0, 0}, {0, 0, -geometry.lidar_offset_m}}; }
};

/// Nearest positive hit distance along a unit direction, or nullopt.
std::optional<double> raycast(const Vec3& origin, const Vec3& dir, const Scene& scene);

/// One ray per (beam, azimuth channel) on the LiDAR's regular angular grid,
/// beam centers spanning the vertical field of view. Points are spherical in
/// the LiDAR frame. `rig_origin` is the world position of the bottom camera;
/// the sensor scans from rig_origin + lidar drop. `azimuth_phase_deg` shifts
/// the whole azimuth grid, as the encoder phase of a spinning unit does
/// between revolutions; without it, aggregated frames would sample bitwise
/// identical directions, which no real sensor does.
PointCloud render_lidar(const Scene& scene, const SimRig& rig, const Vec3& rig_origin,
                        int frame_index = 0, double azimuth_phase_deg = 0.0);

/// Dense depth through every pixel center; misses stay invalid.
DepthMap render_depth_map(const Scene& scene, const Vec3& camera_center,
                          const EquirectGeometry& geom);

/// Per-pixel spherical disparity of a bottom-camera depth map.
DisparityMap gt_disparity_map(const DepthMap& bottom_depth, const EquirectGeometry& geom,
                              double baseline_m);

/// n LiDAR hits paired with their reprojections under extr_true, with
/// optional seeded Gaussian pixel noise on the observations.
std::vector<Correspondence> make_correspondences(const Scene& scene, const SimRig& rig,
                                                 const Extrinsics& extr_true, int n,
                                                 double noise_px, uint64_t seed);

}  // namespace panodepth
