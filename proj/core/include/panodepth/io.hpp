#pragma once

// File formats and reports.
//
//   point clouds   .xyz   text, one "x y z" per line, meters, '#' comments
//                  .pcb   binary: magic "PDPC0001", u64 LE count, f32 LE xyz
//   rasters        .pdr   ASCII header line
//                         "PDR1 <w> <h> <depth|disparity> <m|deg> <f32|f64>
//                          <theta_min> <theta_max>\n"
//                         then row-major little-endian payload, NaN = invalid
//   depth PNG      .png   16-bit grayscale, value = round(meters * 256),
//                         0 = invalid (KITTI-style quantization)
//   correspondences .txt  "lx ly lz px py" per line, '#' comments
//   scenes         .scene "plane h" / "sphere cx cy cz r" /
//                         "box cx cy cz sx sy sz" / "cylinder cx cy z0 z1 r"
//
// All writers go through a temp file and an atomic rename, so a failed run
// never leaves a partial output behind.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panodepth/calibration.hpp"
#include "panodepth/completion.hpp"
#include "panodepth/metrics.hpp"
#include "panodepth/raster.hpp"
#include "panodepth/synthetic.hpp"

namespace panodepth {

/// I/O and parse failures; parse errors carry "file:line".
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Write `bytes` to `path` via a sibling temp file plus rename.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

// point clouds ---------------------------------------------------------

std::vector<Vec3> read_point_cloud_text(const std::filesystem::path& path);
void write_point_cloud_text(const std::filesystem::path& path, const std::vector<Vec3>& points);

std::vector<Vec3> read_point_cloud_binary(const std::filesystem::path& path);
void write_point_cloud_binary(const std::filesystem::path& path, const std::vector<Vec3>& points);

/// Dispatch on extension: ".pcb" binary, anything else text.
std::vector<Vec3> read_point_cloud(const std::filesystem::path& path);

// rasters ---------------------------------------------------------------

enum class RasterDType : uint8_t { f32, f64 };

struct RasterHeader {
    MapKind kind = MapKind::depth;
    RasterDType dtype = RasterDType::f32;
    EquirectGeometry geometry;
};

void write_raster(const std::filesystem::path& path, const DepthMap& map,
                  const EquirectGeometry& geom, RasterDType dtype = RasterDType::f32);
std::pair<DepthMap, RasterHeader> read_raster(const std::filesystem::path& path);

void write_depth_png16(const std::filesystem::path& path, const DepthMap& map);
DepthMap read_depth_png16(const std::filesystem::path& path);

void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::vector<uint8_t>& rgb);

// correspondences / scenes / configs ------------------------------------

std::vector<Correspondence> read_correspondences(const std::filesystem::path& path);
void write_correspondences(const std::filesystem::path& path,
                           const std::vector<Correspondence>& corrs);

Scene read_scene(const std::filesystem::path& path);
void write_scene(const std::filesystem::path& path, const Scene& scene);

/// Everything a pipeline run needs, with the reference rig constants as
/// defaults. Loadable from a "key = value" file.
struct PipelineConfig {
    EquirectGeometry geometry{1920, 512, 48.0, 144.0};
    RigGeometry rig;
    RigConfig lidar;
    CompletionParams completion;
    DisparityClamp disparity_clamp;
    double disparity_full_height_px = 960.0;
    uint64_t seed = 0;
    int workers = 1;
};

PipelineConfig read_config(const std::filesystem::path& path);
std::string config_to_string(const PipelineConfig& config);

// reports (JSON) ---------------------------------------------------------

std::string calibration_report_json(const CalibrationResult& result,
                                    const EquirectGeometry& geom);
std::string completion_stats_json(const std::vector<CompletionStats>& per_frame);
std::string completion_evaluation_json(const CompletionEvaluation& ev);

struct TaggedMetrics {
    std::string tag;  // "all", "indoor", ...
    MaskedErrors errors;
    bool has_lrce = false;
    LrceResult lrce;
};
std::string metrics_report_json(const std::vector<TaggedMetrics>& groups);

/// Extrinsics from a calibration report file.
Extrinsics read_extrinsics_json(const std::filesystem::path& path);

}  // namespace panodepth
