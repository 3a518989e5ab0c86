#pragma once

// Sparse-to-dense depth completion on the sphere: temporal aggregation of
// LiDAR clouds, inverse-distance kNN interpolation on a uniform spherical
// query grid, uncertainty + out-of-distribution filtering, projection of the
// survivors into the equirectangular raster.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "panodepth/geometry.hpp"
#include "panodepth/raster.hpp"

namespace panodepth {

struct PointCloud {
    std::vector<SphericalPoint> points;  // sensor-centric
    int frame_index = 0;
    std::optional<RigidTransform> to_common;  // supplied externally (e.g. odometry)
};

enum class AggregationMode : uint8_t { no_movement, transformed };

struct CompletionParams {
    int m = 4;                  // temporal half-window, frames
    int k = 17;                 // interpolation neighbors
    double rip = 0.8;           // target ratio of interpolated points, [0, 1]
    double t_ood_deg = 0.375;   // mean-neighbor-distance cutoff
    long long n_grid = 20'000'000;
    double t_theta_deg = 68.8;  // query polar band is [t_theta, 180 - t_theta]
    double t_inlier = 0.01;
    bool inlier_absolute = false;  // interpret t_inlier in meters instead of relative

    void validate() const;  // throws std::invalid_argument
};

/// Beam layout of the spinning LiDAR.
struct RigConfig {
    double fov_v_deg = 42.4;
    int n_beams = 64;
    double fov_h_deg = 360.0;
    int n_channels_h = 1024;
    double frame_rate_hz = 10.0;
};

struct AggregatedCloud {
    PointCloud cloud;
    int window_first = 0;  // actual window after truncation at sequence ends
    int window_last = 0;
};

/// Union of the clouds within `m` frames of `center`; `transformed` mode
/// applies each cloud's supplied rigid transform first.
AggregatedCloud temporal_aggregate(std::span<const PointCloud> clouds, int center, int m,
                                   AggregationMode mode);

/// Planar angular distance sqrt(dtheta^2 + dphi^2) in degrees with the
/// azimuth difference wrapped into [-180, 180].
double angular_distance(double theta_a_deg, double phi_a_deg, double theta_b_deg,
                        double phi_b_deg);

/// Bucket grid over (theta, phi) with ring-wrapped azimuth columns. Immutable
/// after construction; queries are safe from any number of threads.
class SphericalKnnIndex {
public:
    struct Neighbor {
        double distance_deg = 0.0;
        double r_m = 0.0;
        int index = 0;  // position in the source cloud
    };

    explicit SphericalKnnIndex(std::span<const SphericalPoint> points);

    size_t size() const { return count_; }

    /// The k nearest points by angular_distance, ascending, ties broken by
    /// insertion order. Throws if the cloud holds fewer than k points.
    std::vector<Neighbor> query(double theta_deg, double phi_deg, int k) const;

private:
    struct Entry {
        double theta, phi, r;
        int index;
    };
    std::vector<Entry> entries_;     // cell-major
    std::vector<int> cell_start_;    // CSR offsets, size n_cells + 1
    int n_theta_ = 1, n_phi_ = 1;
    double theta_lo_ = 0.0, cell_theta_ = 1.0, cell_phi_ = 1.0;
    size_t count_ = 0;

    int theta_cell(double theta) const;
    int phi_cell(double phi) const;
};

inline std::vector<SphericalKnnIndex::Neighbor> knn_query(const SphericalKnnIndex& index,
                                                          double theta_deg, double phi_deg,
                                                          int k) {
    return index.query(theta_deg, phi_deg, k);
}

struct Interpolation {
    double r_m = 0.0;
    std::vector<double> weights;  // sums to 1
};

/// Inverse-distance weights over the neighbor set; a zero-distance neighbor
/// short-circuits to its exact depth.
Interpolation interpolate_depth(std::span<const SphericalKnnIndex::Neighbor> neighbors);

/// Relative weighted variance of the neighbor depths around r_q.
double uncertainty(double r_q, std::span<const SphericalKnnIndex::Neighbor> neighbors,
                   std::span<const double> weights);

/// Mean angular distance to the neighbors.
double ood_distance(std::span<const SphericalKnnIndex::Neighbor> neighbors);

struct OodThreshold {
    double t_ood_deg = 0.0;
    double n_neighbors_grid = 0.0;  // k / (2m + 1)
    double delta_theta_deg = 0.0;
    double delta_phi_deg = 0.0;
};

/// Half-pitch heuristic from the LiDAR's angular resolution.
OodThreshold derive_ood_threshold(const RigConfig& rig, int m, int k);

/// Polar-band limit implied by the LiDAR's vertical field of view.
double derive_theta_limit(double fov_v_deg);

struct QueryPoint {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
};

/// Deterministic Fibonacci-lattice sphere sampling of n_grid points, filtered
/// to theta in [t_theta, 180 - t_theta].
std::vector<QueryPoint> generate_query_grid(long long n_grid, double t_theta_deg);

/// Linear-interpolated quantile of the sigma^2 population at level rip.
double uncertainty_threshold_for_rip(std::span<const double> sigma_sq, double rip);

enum class RejectReason : uint8_t { kept, out_of_band, too_far, high_variance };

struct QueryPointResult {
    double theta_deg = 0.0, phi_deg = 0.0;
    double r_m = 0.0;
    double sigma_sq = 0.0;
    double mean_neighbor_dist_deg = 0.0;
    RejectReason reason = RejectReason::kept;
    bool kept() const { return reason == RejectReason::kept; }
};

struct CompletionStats {
    long long n_grid = 0;        // requested lattice size
    long long n_in_band = 0;     // queries inside the polar band
    long long n_candidates = 0;  // passed the OOD filter
    long long n_kept = 0;        // passed the uncertainty filter
    double arip = 0.0;           // n_kept / n_candidates
    double sigma_threshold = 0.0;
    long long labels_original = 0;
    long long labels_added = 0;
    long long labels_total = 0;
};

struct CompletionResult {
    DepthMap dense;
    CompletionStats stats;
};

/// The RIP quantile of one cloud's query-grid sigma^2 population. Sequence
/// runs compute this per cloud, average the thresholds, and pass the average
/// back into complete_depth_map; that averaging is what makes the achieved
/// ratio (ARIP) drift slightly from the requested RIP. Requires rip > 0.
double completion_sigma_threshold(const PointCloud& aggregated, const CompletionParams& params);

/// Full single-frame pipeline: query grid -> interpolate -> filter -> project
/// survivors to nearest pixels (smallest depth wins a collision). Original
/// labels are never overwritten. Without `sigma_threshold` the cloud's own
/// RIP quantile is used (the degenerate single-cloud average).
CompletionResult complete_depth_map(const PointCloud& aggregated, const DepthMap& sparse,
                                    const EquirectGeometry& geom, const CompletionParams& params,
                                    std::optional<double> sigma_threshold = {});

/// Seeded uniform split without replacement; train gets round(ratio * n).
std::pair<PointCloud, PointCloud> holdout_split(const PointCloud& cloud, double ratio,
                                                uint64_t seed);

struct CompletionEvaluation {
    double mae = 0.0, rmse = 0.0, mare = 0.0;
    double inlier_ratio = 0.0;
    double arip = 0.0;
    long long evaluated = 0;
};

/// Interpolates each test point from the train cloud, filters per params,
/// and reports error metrics over the surviving estimates.
CompletionEvaluation evaluate_completion(const PointCloud& train, const PointCloud& test,
                                         const CompletionParams& params);

struct RlpReport {
    double rlp_original = 0.0;
    double rlp_completed = 0.0;
    int h_min = 0, h_max = 0;  // labeled-row extent of the original map
    long long labels_original = 0;
    long long labels_completed_in_band = 0;
};

/// Ratio of labeled pixels inside the labelable band of the original map;
/// completed labels outside the band are ignored.
RlpReport rlp(const DepthMap& original, const DepthMap& completed);

}  // namespace panodepth
