#pragma once

// LiDAR-to-image extrinsic calibration: minimize squared reprojection error
// of hand-picked LiDAR/pixel correspondences over a 6-parameter rigid
// transform (axis-angle rotation + translation), quasi-Newton.

#include <vector>

#include "panodepth/geometry.hpp"

namespace panodepth {

/// Rigid transform from the LiDAR frame to the bottom-camera frame.
using Extrinsics = RigidTransform;

inline Vec3 transform_point(const Vec3& p, const Extrinsics& extr) { return extr.apply(p); }

struct Correspondence {
    Vec3 lidar_point;        // LiDAR frame, meters
    PixelCoord image_point;  // bottom equirectangular image
};

/// transform -> spherical -> equirectangular. Throws on a point at the camera
/// origin or a polar angle outside the raster band.
PixelCoord reproject(const Vec3& p, const Extrinsics& extr, const EquirectGeometry& geom);

/// Pixel distance with the horizontal component reduced modulo the image
/// width to the nearest representative, so the 360° seam does not inflate
/// residuals.
double pixel_distance_wrapped(const PixelCoord& a, const PixelCoord& b, int width);

/// Per-correspondence reprojection errors in pixels. Rows extrapolate beyond
/// the raster band so the objective stays defined while the optimizer moves.
std::vector<double> residuals(const std::vector<Correspondence>& corrs, const Extrinsics& extr,
                              const EquirectGeometry& geom);

struct OptimizeOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;  // infinity norm, squared-pixel units
    double step_tolerance = 1e-12;
    double fd_step = 1e-6;  // relative central-difference step
};

struct CalibrationResult {
    Extrinsics extrinsics;
    double total_error = 0.0;  // E = sum of squared pixel errors
    std::vector<double> per_point_errors;
    int iterations = 0;
    bool converged = false;
    double initial_error = 0.0;
};

/// BFGS over (axis-angle, translation) with central finite-difference
/// gradients. Never returns an iterate worse than the initial guess; requires
/// at least 3 correspondences.
CalibrationResult optimize_extrinsics(const std::vector<Correspondence>& corrs,
                                      const Extrinsics& init, const EquirectGeometry& geom,
                                      const OptimizeOptions& opts = {});

struct ProjectionQuality {
    double avg_pixel_error = 0.0;
    double relative_error_percent = 0.0;  // of the image diagonal
};

/// Mean pixel error of (projected, observed) pairs and the same error as a
/// percentage of the image diagonal.
ProjectionQuality projection_quality_report(
    const std::vector<std::pair<PixelCoord, PixelCoord>>& pairs, const EquirectGeometry& geom);

}  // namespace panodepth
