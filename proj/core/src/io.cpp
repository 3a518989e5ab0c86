#include "panodepth/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace panodepth {

using json = nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

/// Parse exactly `n` finite doubles from `line`; returns false on malformed
/// input, trailing tokens, or non-finite values.
bool parse_doubles(const std::string& line, double* out, int n) {
    std::istringstream ss(line);
    for (int i = 0; i < n; ++i) {
        if (!(ss >> out[i])) return false;
        if (!std::isfinite(out[i])) return false;
    }
    std::string rest;
    if (ss >> rest) return false;
    return true;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, size_t line_no,
                             const std::string& what) {
    throw io_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) {
            out.close();
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw io_error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw io_error("cannot rename " + tmp.string() + " to " + path.string());
    }
}

// point clouds -----------------------------------------------------------

std::vector<Vec3> read_point_cloud_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<Vec3> points;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        double v[3];
        if (!parse_doubles(line, v, 3)) parse_fail(path, line_no, "expected 'x y z'");
        points.push_back({v[0], v[1], v[2]});
    }
    return points;
}

void write_point_cloud_text(const std::filesystem::path& path, const std::vector<Vec3>& points) {
    std::ostringstream out;
    out.precision(9);
    for (const auto& p : points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    atomic_write(path, std::move(out).str());
}

namespace {
constexpr char kCloudMagic[8] = {'P', 'D', 'P', 'C', '0', '0', '0', '1'};
}

std::vector<Vec3> read_point_cloud_binary(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kCloudMagic, 8) != 0)
        throw io_error(path.string() + ": not a binary point cloud (bad magic)");
    uint64_t count;
    std::memcpy(&count, bytes.data() + 8, 8);
    if (bytes.size() != 16 + count * 12)
        throw io_error(path.string() + ": truncated binary point cloud");
    std::vector<Vec3> points(count);
    const char* p = bytes.data() + 16;
    for (uint64_t i = 0; i < count; ++i) {
        float v[3];
        std::memcpy(v, p, 12);
        p += 12;
        points[i] = {v[0], v[1], v[2]};
    }
    return points;
}

void write_point_cloud_binary(const std::filesystem::path& path, const std::vector<Vec3>& points) {
    std::string bytes;
    bytes.reserve(16 + points.size() * 12);
    bytes.append(kCloudMagic, 8);
    const uint64_t count = points.size();
    bytes.append(reinterpret_cast<const char*>(&count), 8);
    for (const auto& p : points) {
        const float v[3] = {float(p.x), float(p.y), float(p.z)};
        bytes.append(reinterpret_cast<const char*>(v), 12);
    }
    atomic_write(path, bytes);
}

std::vector<Vec3> read_point_cloud(const std::filesystem::path& path) {
    return path.extension() == ".pcb" ? read_point_cloud_binary(path)
                                      : read_point_cloud_text(path);
}

// rasters ------------------------------------------------------------------

void write_raster(const std::filesystem::path& path, const DepthMap& map,
                  const EquirectGeometry& geom, RasterDType dtype) {
    if (map.width != geom.width || map.height != geom.height)
        throw std::invalid_argument("write_raster: map dimensions disagree with geometry");
    std::ostringstream header;
    header.precision(17);
    header << "PDR1 " << map.width << ' ' << map.height << ' '
           << (map.kind == MapKind::depth ? "depth" : "disparity") << ' '
           << (map.kind == MapKind::depth ? "m" : "deg") << ' '
           << (dtype == RasterDType::f32 ? "f32" : "f64") << ' ' << geom.theta_min_deg << ' '
           << geom.theta_max_deg << '\n';

    std::string bytes = std::move(header).str();
    const size_t n = map.values.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (dtype == RasterDType::f32) {
        std::vector<float> buf(n);
        for (size_t i = 0; i < n; ++i) buf[i] = map.valid[i] ? float(map.values[i]) : float(nan);
        bytes.append(reinterpret_cast<const char*>(buf.data()), n * 4);
    } else {
        std::vector<double> buf(n);
        for (size_t i = 0; i < n; ++i) buf[i] = map.valid[i] ? map.values[i] : nan;
        bytes.append(reinterpret_cast<const char*>(buf.data()), n * 8);
    }
    atomic_write(path, bytes);
}

std::pair<DepthMap, RasterHeader> read_raster(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const size_t nl = bytes.find('\n');
    if (nl == std::string::npos || bytes.compare(0, 5, "PDR1 ") != 0)
        throw io_error(path.string() + ": not a raster file (bad magic)");

    std::istringstream header(bytes.substr(5, nl - 5));
    int w, h;
    std::string channel, unit, dtype;
    double tmin, tmax;
    if (!(header >> w >> h >> channel >> unit >> dtype >> tmin >> tmax))
        throw io_error(path.string() + ": malformed raster header");
    if (w <= 0 || h <= 0) throw io_error(path.string() + ": bad raster dimensions");

    RasterHeader info;
    if (channel == "depth") info.kind = MapKind::depth;
    else if (channel == "disparity") info.kind = MapKind::disparity;
    else throw io_error(path.string() + ": unknown raster channel '" + channel + "'");
    if (dtype == "f32") info.dtype = RasterDType::f32;
    else if (dtype == "f64") info.dtype = RasterDType::f64;
    else throw io_error(path.string() + ": unknown raster dtype '" + dtype + "'");
    info.geometry = {w, h, tmin, tmax};
    info.geometry.validate();

    const size_t n = size_t(w) * h;
    const size_t elem = info.dtype == RasterDType::f32 ? 4 : 8;
    if (bytes.size() != nl + 1 + n * elem)
        throw io_error(path.string() + ": raster payload size mismatch");

    DepthMap map(w, h, info.kind);
    const char* p = bytes.data() + nl + 1;
    for (size_t i = 0; i < n; ++i) {
        double v;
        if (info.dtype == RasterDType::f32) {
            float f;
            std::memcpy(&f, p + i * 4, 4);
            v = f;
        } else {
            std::memcpy(&v, p + i * 8, 8);
        }
        if (!std::isnan(v)) {
            map.values[i] = v;
            map.valid[i] = 1;
        }
    }
    return {std::move(map), info};
}

// correspondences ------------------------------------------------------------

std::vector<Correspondence> read_correspondences(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<Correspondence> corrs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        double v[5];
        if (!parse_doubles(line, v, 5)) parse_fail(path, line_no, "expected 'lx ly lz px py'");
        corrs.push_back({{v[0], v[1], v[2]}, {v[3], v[4]}});
    }
    return corrs;
}

void write_correspondences(const std::filesystem::path& path,
                           const std::vector<Correspondence>& corrs) {
    std::ostringstream out;
    out.precision(12);
    out << "# lx ly lz px py\n";
    for (const auto& c : corrs)
        out << c.lidar_point.x << ' ' << c.lidar_point.y << ' ' << c.lidar_point.z << ' '
            << c.image_point.x << ' ' << c.image_point.y << '\n';
    atomic_write(path, std::move(out).str());
}

// scenes ----------------------------------------------------------------------

Scene read_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    Scene scene;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        std::istringstream ss(line);
        std::string kind;
        ss >> kind;
        std::string rest;
        std::getline(ss, rest);
        double v[6];
        if (kind == "plane") {
            if (!parse_doubles(rest, v, 1)) parse_fail(path, line_no, "plane expects 'h'");
            scene.planes.push_back({v[0]});
        } else if (kind == "sphere") {
            if (!parse_doubles(rest, v, 4)) parse_fail(path, line_no, "sphere expects 'cx cy cz r'");
            if (v[3] <= 0) parse_fail(path, line_no, "sphere radius must be positive");
            scene.spheres.push_back({{v[0], v[1], v[2]}, v[3]});
        } else if (kind == "box") {
            if (!parse_doubles(rest, v, 6))
                parse_fail(path, line_no, "box expects 'cx cy cz sx sy sz'");
            if (v[3] <= 0 || v[4] <= 0 || v[5] <= 0)
                parse_fail(path, line_no, "box extents must be positive");
            scene.boxes.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
        } else if (kind == "cylinder") {
            if (!parse_doubles(rest, v, 5))
                parse_fail(path, line_no, "cylinder expects 'cx cy z0 z1 r'");
            if (v[3] <= v[2] || v[4] <= 0)
                parse_fail(path, line_no, "cylinder needs z1 > z0 and positive radius");
            scene.cylinders.push_back({v[0], v[1], v[2], v[3], v[4]});
        } else {
            parse_fail(path, line_no, "unknown primitive '" + kind + "'");
        }
    }
    return scene;
}

void write_scene(const std::filesystem::path& path, const Scene& scene) {
    std::ostringstream out;
    out.precision(12);
    for (const auto& p : scene.planes) out << "plane " << p.height << '\n';
    for (const auto& s : scene.spheres)
        out << "sphere " << s.center.x << ' ' << s.center.y << ' ' << s.center.z << ' '
            << s.radius << '\n';
    for (const auto& b : scene.boxes)
        out << "box " << b.center.x << ' ' << b.center.y << ' ' << b.center.z << ' ' << b.size.x
            << ' ' << b.size.y << ' ' << b.size.z << '\n';
    for (const auto& c : scene.cylinders)
        out << "cylinder " << c.cx << ' ' << c.cy << ' ' << c.z_min << ' ' << c.z_max << ' '
            << c.radius << '\n';
    atomic_write(path, std::move(out).str());
}

// config ------------------------------------------------------------------------

PipelineConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    PipelineConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(path, line_no, "expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) parse_fail(path, line_no, "expected 'key = value'");

        double num = 0.0;
        const bool is_number =
            std::from_chars(value.data(), value.data() + value.size(), num).ec == std::errc();

        auto need_number = [&]() {
            if (!is_number) parse_fail(path, line_no, "'" + key + "' expects a number");
            return num;
        };
        auto need_bool = [&]() {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            parse_fail(path, line_no, "'" + key + "' expects true/false");
        };

        if (key == "geometry.width") cfg.geometry.width = int(need_number());
        else if (key == "geometry.height") cfg.geometry.height = int(need_number());
        else if (key == "geometry.theta_min") cfg.geometry.theta_min_deg = need_number();
        else if (key == "geometry.theta_max") cfg.geometry.theta_max_deg = need_number();
        else if (key == "rig.baseline") cfg.rig.baseline_m = need_number();
        else if (key == "rig.lidar_offset") cfg.rig.lidar_offset_m = need_number();
        else if (key == "lidar.fov_v") cfg.lidar.fov_v_deg = need_number();
        else if (key == "lidar.beams") cfg.lidar.n_beams = int(need_number());
        else if (key == "lidar.fov_h") cfg.lidar.fov_h_deg = need_number();
        else if (key == "lidar.channels") cfg.lidar.n_channels_h = int(need_number());
        else if (key == "lidar.frame_rate") cfg.lidar.frame_rate_hz = need_number();
        else if (key == "completion.m") cfg.completion.m = int(need_number());
        else if (key == "completion.k") cfg.completion.k = int(need_number());
        else if (key == "completion.rip") cfg.completion.rip = need_number();
        else if (key == "completion.t_ood") cfg.completion.t_ood_deg = need_number();
        else if (key == "completion.n_grid") cfg.completion.n_grid = (long long)(need_number());
        else if (key == "completion.t_theta") cfg.completion.t_theta_deg = need_number();
        else if (key == "completion.t_inlier") cfg.completion.t_inlier = need_number();
        else if (key == "completion.inlier_absolute") cfg.completion.inlier_absolute = need_bool();
        else if (key == "disparity.clamp_min") cfg.disparity_clamp.min_deg = need_number();
        else if (key == "disparity.clamp_max") cfg.disparity_clamp.max_deg = need_number();
        else if (key == "disparity.full_height_px") cfg.disparity_full_height_px = need_number();
        else if (key == "seed") cfg.seed = uint64_t(need_number());
        else if (key == "workers") cfg.workers = int(need_number());
        else parse_fail(path, line_no, "unknown key '" + key + "'");
    }
    cfg.geometry.validate();
    cfg.completion.validate();
    return cfg;
}

std::string config_to_string(const PipelineConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "geometry.width = " << c.geometry.width << '\n'
        << "geometry.height = " << c.geometry.height << '\n'
        << "geometry.theta_min = " << c.geometry.theta_min_deg << '\n'
        << "geometry.theta_max = " << c.geometry.theta_max_deg << '\n'
        << "rig.baseline = " << c.rig.baseline_m << '\n'
        << "rig.lidar_offset = " << c.rig.lidar_offset_m << '\n'
        << "lidar.fov_v = " << c.lidar.fov_v_deg << '\n'
        << "lidar.beams = " << c.lidar.n_beams << '\n'
        << "lidar.fov_h = " << c.lidar.fov_h_deg << '\n'
        << "lidar.channels = " << c.lidar.n_channels_h << '\n'
        << "lidar.frame_rate = " << c.lidar.frame_rate_hz << '\n'
        << "completion.m = " << c.completion.m << '\n'
        << "completion.k = " << c.completion.k << '\n'
        << "completion.rip = " << c.completion.rip << '\n'
        << "completion.t_ood = " << c.completion.t_ood_deg << '\n'
        << "completion.n_grid = " << c.completion.n_grid << '\n'
        << "completion.t_theta = " << c.completion.t_theta_deg << '\n'
        << "completion.t_inlier = " << c.completion.t_inlier << '\n'
        << "completion.inlier_absolute = " << (c.completion.inlier_absolute ? "true" : "false")
        << '\n'
        << "disparity.clamp_min = " << c.disparity_clamp.min_deg << '\n'
        << "disparity.clamp_max = " << c.disparity_clamp.max_deg << '\n'
        << "disparity.full_height_px = " << c.disparity_full_height_px << '\n'
        << "seed = " << c.seed << '\n'
        << "workers = " << c.workers << '\n';
    return std::move(out).str();
}

// reports -------------------------------------------------------------------------

namespace {

json mat3_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
    return rows;
}

}  // namespace

std::string calibration_report_json(const CalibrationResult& result,
                                    const EquirectGeometry& geom) {
    json j;
    j["extrinsics"]["rotation_axis_angle"] = {result.extrinsics.rotation.x,
                                              result.extrinsics.rotation.y,
                                              result.extrinsics.rotation.z};
    j["extrinsics"]["translation"] = {result.extrinsics.translation.x,
                                      result.extrinsics.translation.y,
                                      result.extrinsics.translation.z};
    j["extrinsics"]["rotation_matrix"] = mat3_json(result.extrinsics.rotation_matrix());
    j["total_error_px2"] = result.total_error;
    j["initial_error_px2"] = result.initial_error;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["per_point_errors_px"] = result.per_point_errors;
    double mean = 0.0, worst = 0.0;
    for (double e : result.per_point_errors) {
        mean += e;
        worst = std::max(worst, e);
    }
    if (!result.per_point_errors.empty()) mean /= double(result.per_point_errors.size());
    j["mean_residual_px"] = mean;
    j["max_residual_px"] = worst;
    j["geometry"] = {{"width", geom.width},
                     {"height", geom.height},
                     {"theta_min", geom.theta_min_deg},
                     {"theta_max", geom.theta_max_deg}};
    return j.dump(2) + "\n";
}

namespace {

json stats_json(const CompletionStats& s) {
    return {{"n_grid", s.n_grid},
            {"n_in_band", s.n_in_band},
            {"n_candidates", s.n_candidates},
            {"n_kept", s.n_kept},
            {"arip", s.arip},
            {"sigma_threshold", s.sigma_threshold},
            {"labels_original", s.labels_original},
            {"labels_added", s.labels_added},
            {"labels_total", s.labels_total}};
}

}  // namespace

std::string completion_stats_json(const std::vector<CompletionStats>& per_frame) {
    json j;
    j["frames"] = json::array();
    double arip_sum = 0.0;
    long long ori = 0, total = 0;
    for (const auto& s : per_frame) {
        j["frames"].push_back(stats_json(s));
        arip_sum += s.arip;
        ori += s.labels_original;
        total += s.labels_total;
    }
    j["frame_count"] = per_frame.size();
    if (!per_frame.empty()) j["mean_arip"] = arip_sum / double(per_frame.size());
    j["labels_original"] = ori;
    j["labels_total"] = total;
    return j.dump(2) + "\n";
}

std::string completion_evaluation_json(const CompletionEvaluation& ev) {
    json j{{"mae", ev.mae},       {"rmse", ev.rmse},
           {"mare", ev.mare},     {"inlier_ratio", ev.inlier_ratio},
           {"arip", ev.arip},     {"evaluated", ev.evaluated}};
    return j.dump(2) + "\n";
}

std::string metrics_report_json(const std::vector<TaggedMetrics>& groups) {
    json j;
    for (const auto& g : groups) {
        json m{{"mae", g.errors.mae},
               {"rmse", g.errors.rmse},
               {"mare", g.errors.mare},
               {"image_count", g.errors.image_count},
               {"evaluated_pixel_count", g.errors.evaluated_pixel_count},
               {"missing_pred_pixel_count", g.errors.missing_pred_pixel_count}};
        if (g.has_lrce) {
            m["lrce"] = g.lrce.lrce;
            m["lrce_pair_count"] = g.lrce.pair_count;
            m["lrce_skipped_pred_pairs"] = g.lrce.skipped_pred_pairs;
        }
        j[g.tag] = m;
    }
    return j.dump(2) + "\n";
}

Extrinsics read_extrinsics_json(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
        const auto& e = j.at("extrinsics");
        const auto& r = e.at("rotation_axis_angle");
        const auto& t = e.at("translation");
        return {{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()},
                {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()}};
    } catch (const json::exception& ex) {
        throw io_error(path.string() + ": bad extrinsics JSON (" + ex.what() + ")");
    }
}

}  // namespace panodepth
