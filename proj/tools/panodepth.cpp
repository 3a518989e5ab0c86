// panodepth: LiDAR -> 360° depth ground-truth toolkit.
//
// Subcommands: calibrate, project, complete, evaluate, convert, simulate,
// colorize. Exit codes: 0 ok, 1 usage, 2 I/O, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "panodepth/colormap.hpp"
#include "panodepth/io.hpp"
#include "panodepth/metrics.hpp"
#include "panodepth/synthetic.hpp"

namespace fs = std::filesystem;
using namespace panodepth;

namespace {

struct GlobalOpts {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;  // 0 = from config

    PipelineConfig load() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = read_config(config_path);
        if (seed_set) cfg.seed = seed;
        if (workers > 0) cfg.workers = workers;
        return cfg;
    }
};

Vec3 parse_triple(const std::string& s, const std::string& flag) {
    Vec3 v;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
        throw CLI::ValidationError(flag, "expected three comma-separated numbers");
    return v;
}

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<const char*> exts) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) throw io_error(dir.string() + " is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        for (const char* e : exts)
            if (entry.path().extension() == e) {
                files.push_back(entry.path());
                break;
            }
    }
    std::sort(files.begin(), files.end());
    return files;
}

void run_parallel(int workers, int jobs, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, jobs));
    if (workers == 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// project one cloud file onto the raster; returns the sparse map
DepthMap project_cloud(const std::vector<Vec3>& points, const Extrinsics& extr,
                       const EquirectGeometry& geom, long long* out_of_band) {
    DepthMap map(geom.width, geom.height, MapKind::depth);
    const Mat3 rot = extr.rotation_matrix();
    long long skipped = 0;
    for (const auto& p : points) {
        const Vec3 cam = rot * p + extr.translation;
        if (cam.norm() == 0.0) {
            ++skipped;
            continue;
        }
        const SphericalPoint sp = cart_to_spherical(cam);
        if (!theta_in_band(sp.theta_deg, geom)) {
            ++skipped;
            continue;
        }
        const PixelCoord px = spherical_to_pixel_unchecked(sp, geom);
        int ix = ((int(std::floor(px.x)) % geom.width) + geom.width) % geom.width;
        int iy = std::clamp(int(std::floor(px.y)), 0, geom.height - 1);
        if (!map.is_valid(ix, iy) || sp.r < map.at(ix, iy)) map.set(ix, iy, sp.r);
    }
    if (out_of_band) *out_of_band = skipped;
    return map;
}

int cmd_calibrate(const GlobalOpts& global, const std::string& corrs_path,
                  const std::string& out_path, const std::string& init_rot,
                  const std::string& init_trans) {
    const PipelineConfig cfg = global.load();
    const auto corrs = read_correspondences(corrs_path);

    Extrinsics init{{0, 0, 0}, {0, 0, -cfg.rig.lidar_offset_m}};
    if (!init_rot.empty()) init.rotation = parse_triple(init_rot, "--init-rotation");
    if (!init_trans.empty()) init.translation = parse_triple(init_trans, "--init-translation");

    const CalibrationResult result = optimize_extrinsics(corrs, init, cfg.geometry);
    atomic_write(out_path, calibration_report_json(result, cfg.geometry));

    double mean = 0.0;
    for (double e : result.per_point_errors) mean += e;
    mean /= double(result.per_point_errors.size());
    std::cout << "calibrated " << corrs.size() << " correspondences: E = " << result.total_error
              << " px^2, mean residual = " << mean << " px, " << result.iterations
              << " iterations" << (result.converged ? "" : " (NOT converged)") << "\n";
    if (!result.converged) {
        std::cerr << "error: optimizer did not converge\n";
        return 3;
    }
    return 0;
}

int cmd_project(const GlobalOpts& global, const std::string& cloud_path,
                const std::string& out_path, const std::string& extr_json,
                const std::string& rot_str, const std::string& trans_str, bool png16) {
    const PipelineConfig cfg = global.load();

    Extrinsics extr{{0, 0, 0}, {0, 0, 0}};
    if (!extr_json.empty()) extr = read_extrinsics_json(extr_json);
    if (!rot_str.empty()) extr.rotation = parse_triple(rot_str, "--rotation");
    if (!trans_str.empty()) extr.translation = parse_triple(trans_str, "--translation");

    std::vector<std::pair<fs::path, fs::path>> jobs;
    if (fs::is_directory(cloud_path)) {
        fs::create_directories(out_path);
        for (const auto& f : list_files(cloud_path, {".xyz", ".pcb"}))
            jobs.emplace_back(f, fs::path(out_path) / (f.stem().string() + (png16 ? ".png" : ".pdr")));
    } else {
        jobs.emplace_back(cloud_path, out_path);
    }

    for (const auto& [in_file, out_file] : jobs) {
        const auto points = read_point_cloud(in_file);
        if (points.empty())
            std::cerr << "warning: " << in_file.string() << " holds no points; map is all-invalid\n";
        long long skipped = 0;
        const DepthMap map = project_cloud(points, extr, cfg.geometry, &skipped);
        if (png16)
            write_depth_png16(out_file, map);
        else
            write_raster(out_file, map, cfg.geometry);
        std::cout << out_file.string() << ": " << map.label_count() << " labeled pixels";
        if (skipped > 0) std::cout << ", " << skipped << " points outside the band";
        std::cout << "\n";
    }
    return 0;
}

int cmd_complete(const GlobalOpts& global, const std::string& clouds_dir,
                 const std::string& maps_dir, const std::string& out_dir,
                 const std::string& mode_str, const std::string& transforms_path) {
    const PipelineConfig cfg = global.load();
    const AggregationMode mode = mode_str == "transformed" ? AggregationMode::transformed
                                                           : AggregationMode::no_movement;

    const auto cloud_files = list_files(clouds_dir, {".xyz", ".pcb"});
    const auto map_files = list_files(maps_dir, {".pdr", ".png"});
    if (cloud_files.empty()) throw std::invalid_argument("no point clouds in " + clouds_dir);
    if (cloud_files.size() != map_files.size())
        throw std::invalid_argument("frame/cloud count mismatch: " +
                                    std::to_string(cloud_files.size()) + " clouds vs " +
                                    std::to_string(map_files.size()) + " maps");

    std::vector<RigidTransform> transforms;
    if (!transforms_path.empty()) {
        std::ifstream in(transforms_path);
        if (!in) throw io_error("cannot open " + transforms_path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) { blank = (c == '#'); break; }
            if (blank) continue;
            double v[6];
            if (std::sscanf(line.c_str(), "%lf %lf %lf %lf %lf %lf", &v[0], &v[1], &v[2], &v[3],
                            &v[4], &v[5]) != 6)
                throw io_error(transforms_path + ":" + std::to_string(line_no) +
                               ": expected 'rx ry rz tx ty tz'");
            transforms.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
        }
        if (transforms.size() != cloud_files.size())
            throw std::invalid_argument("transform count does not match cloud count");
    }
    if (mode == AggregationMode::transformed && transforms.empty())
        throw std::invalid_argument("transformed mode requires --transforms");

    // load the whole sequence once; frames share it read-only
    std::vector<PointCloud> clouds(cloud_files.size());
    for (size_t i = 0; i < cloud_files.size(); ++i) {
        const auto pts = read_point_cloud(cloud_files[i]);
        clouds[i].frame_index = int(i);
        clouds[i].points.reserve(pts.size());
        for (const auto& p : pts) clouds[i].points.push_back(cart_to_spherical(p));
        if (!transforms.empty()) clouds[i].to_common = transforms[i];
    }

    fs::create_directories(out_dir);
    std::vector<CompletionStats> stats(cloud_files.size());
    const int n_frames = int(cloud_files.size());

    // per-cloud sigma^2 thresholds are averaged over the sequence and the
    // average is applied everywhere; the achieved ratio (ARIP) therefore
    // drifts slightly from the requested RIP
    std::optional<double> seq_threshold;
    if (cfg.completion.rip > 0.0 && n_frames > 1) {
        std::vector<double> thresholds(n_frames);
        run_parallel(cfg.workers, n_frames, [&](int i) {
            const AggregatedCloud agg = temporal_aggregate(clouds, i, cfg.completion.m, mode);
            thresholds[i] = completion_sigma_threshold(agg.cloud, cfg.completion);
        });
        double sum = 0.0;
        for (double t : thresholds) sum += t;
        seq_threshold = sum / double(n_frames);
    }

    run_parallel(cfg.workers, n_frames, [&](int i) {
        DepthMap sparse;
        EquirectGeometry geom = cfg.geometry;
        if (map_files[i].extension() == ".png") {
            sparse = read_depth_png16(map_files[i]);  // geometry comes from the config
        } else {
            auto loaded = read_raster(map_files[i]);
            sparse = std::move(loaded.first);
            geom = loaded.second.geometry;
        }
        const AggregatedCloud agg = temporal_aggregate(clouds, i, cfg.completion.m, mode);
        CompletionResult res =
            complete_depth_map(agg.cloud, sparse, geom, cfg.completion, seq_threshold);
        const fs::path out_file =
            fs::path(out_dir) / (map_files[i].stem().string() + ".pdr");
        write_raster(out_file, res.dense, geom);
        stats[i] = res.stats;
    });

    atomic_write(fs::path(out_dir) / "stats.json", completion_stats_json(stats));
    double arip = 0.0;
    for (const auto& s : stats) arip += s.arip;
    std::cout << "completed " << n_frames << " frames, mean ARIP = " << arip / n_frames << "\n";
    return 0;
}

int cmd_evaluate(const GlobalOpts&, const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& completed_dir, bool want_lrce, const std::string& tags_path,
                 const std::string& out_path, bool pooled) {
    const auto pred_files = list_files(pred_dir, {".pdr", ".png"});
    const auto gt_files = list_files(gt_dir, {".pdr", ".png"});
    if (pred_files.empty()) throw std::invalid_argument("no rasters in " + pred_dir);
    if (pred_files.size() != gt_files.size())
        throw std::invalid_argument("prediction/gt image counts differ");
    if (want_lrce && completed_dir.empty())
        throw std::invalid_argument("--lrce needs --completed-gt (completed maps make edge pairs)");

    auto load = [](const fs::path& p) {
        return p.extension() == ".png" ? read_depth_png16(p) : read_raster(p).first;
    };

    std::vector<fs::path> completed_files;
    if (want_lrce) {
        completed_files = list_files(completed_dir, {".pdr", ".png"});
        if (completed_files.size() != pred_files.size())
            throw std::invalid_argument("completed-gt image count differs from predictions");
    }

    // scene tags are sidecar metadata: "<filename> <tag>" per line
    std::map<std::string, std::string> tag_of;
    if (!tags_path.empty()) {
        std::ifstream in(tags_path);
        if (!in) throw io_error("cannot open " + tags_path);
        std::string name, tag;
        while (in >> name >> tag) tag_of[name] = tag;
    }

    // one pass over the files; every image feeds the "all" group plus its tag
    struct Group {
        MetricsAccumulator errors;
        LrceAccumulator lrce;
    };
    std::map<std::string, Group> groups;
    for (size_t i = 0; i < pred_files.size(); ++i) {
        const DepthMap pred = load(pred_files[i]);
        const DepthMap gt = load(gt_files[i]);
        DepthMap completed;
        if (want_lrce) completed = load(completed_files[i]);

        const std::string name = pred_files[i].filename().string();
        std::vector<std::string> tags{"all"};
        if (const auto it = tag_of.find(name); it != tag_of.end()) tags.push_back(it->second);
        for (const auto& tag : tags) {
            Group& group = groups[tag];
            group.errors.add_image(pred, gt, name);
            if (want_lrce) group.lrce.add_image(pred, completed, name);
        }
    }

    const MetricAggregation agg =
        pooled ? MetricAggregation::pooled : MetricAggregation::per_image;
    std::vector<TaggedMetrics> report;
    for (auto& [tag, group] : groups) {
        TaggedMetrics tm;
        tm.tag = tag;
        tm.errors = group.errors.result(agg);
        if (want_lrce) {
            tm.lrce = group.lrce.result();
            tm.has_lrce = true;
        }
        report.push_back(std::move(tm));
    }

    const std::string doc = metrics_report_json(report);
    if (out_path.empty())
        std::cout << doc;
    else
        atomic_write(out_path, doc);
    return 0;
}

int cmd_convert(const GlobalOpts& global, const std::string& in_path, const std::string& out_path,
                const std::string& to, const std::string& dtype_str) {
    const PipelineConfig cfg = global.load();
    auto [map, header] = read_raster(in_path);
    const EquirectGeometry geom = header.geometry;

    const RasterDType dtype = dtype_str == "f64" ? RasterDType::f64 : RasterDType::f32;
    long long clamped = 0;

    DepthMap out(geom.width, geom.height,
                 to == "disparity" ? MapKind::disparity : MapKind::depth);
    if (to == "disparity") {
        if (map.kind != MapKind::depth)
            throw std::invalid_argument("convert: input is not a depth map");
        for (int y = 0; y < geom.height; ++y) {
            const double theta = geom.row_theta_deg(y);
            for (int x = 0; x < geom.width; ++x)
                if (map.is_valid(x, y))
                    out.set(x, y, depth_to_disparity(map.at(x, y), theta, cfg.rig.baseline_m));
        }
    } else if (to == "depth") {
        if (map.kind != MapKind::disparity)
            throw std::invalid_argument("convert: input is not a disparity map");
        for (int y = 0; y < geom.height; ++y) {
            const double theta = geom.row_theta_deg(y);
            for (int x = 0; x < geom.width; ++x)
                if (map.is_valid(x, y)) {
                    const auto r =
                        disparity_to_depth(map.at(x, y), theta, cfg.rig.baseline_m,
                                           cfg.disparity_clamp);
                    if (r.clamped) ++clamped;
                    out.set(x, y, r.depth_m);
                }
        }
    } else {
        throw std::invalid_argument("convert: --to must be 'depth' or 'disparity'");
    }

    write_raster(out_path, out, geom, dtype);
    std::cout << out_path << ": " << out.label_count() << " pixels converted";
    if (clamped > 0) std::cout << ", " << clamped << " clamped";
    std::cout << "\n";
    return 0;
}

int cmd_simulate(const GlobalOpts& global, const std::string& scene_path,
                 const std::string& out_dir, int frames, const std::string& motion_str,
                 double azimuth_drift, int n_corrs, double noise_px, bool binary_clouds,
                 const std::string& dtype_str) {
    const PipelineConfig cfg = global.load();
    const Scene scene = read_scene(scene_path);
    const RasterDType dtype = dtype_str == "f64" ? RasterDType::f64 : RasterDType::f32;

    SimRig rig;
    rig.geometry = cfg.rig;
    rig.lidar = cfg.lidar;
    rig.camera_raster = cfg.geometry;

    Vec3 motion{0, 0, 0};
    if (!motion_str.empty()) motion = parse_triple(motion_str, "--motion");

    fs::create_directories(out_dir);
    for (int f = 0; f < frames; ++f) {
        const Vec3 origin = motion * double(f);
        const PointCloud cloud = render_lidar(scene, rig, origin, f, azimuth_drift * f);
        std::vector<Vec3> pts;
        pts.reserve(cloud.points.size());
        for (const auto& sp : cloud.points) pts.push_back(spherical_to_cart(sp));

        char name[64];
        std::snprintf(name, sizeof name, "cloud_%03d.%s", f, binary_clouds ? "pcb" : "xyz");
        if (binary_clouds)
            write_point_cloud_binary(fs::path(out_dir) / name, pts);
        else
            write_point_cloud_text(fs::path(out_dir) / name, pts);

        const DepthMap depth = render_depth_map(scene, origin, cfg.geometry);
        std::snprintf(name, sizeof name, "depth_%03d.pdr", f);
        write_raster(fs::path(out_dir) / name, depth, cfg.geometry, dtype);

        const DisparityMap disp = gt_disparity_map(depth, cfg.geometry, cfg.rig.baseline_m);
        std::snprintf(name, sizeof name, "disparity_%03d.pdr", f);
        write_raster(fs::path(out_dir) / name, disp, cfg.geometry, dtype);
    }

    if (n_corrs > 0) {
        const auto corrs = make_correspondences(scene, rig, rig.true_extrinsics(), n_corrs,
                                                noise_px, cfg.seed);
        write_correspondences(fs::path(out_dir) / "corrs.txt", corrs);
    }
    std::cout << "simulated " << frames << " frame(s) into " << out_dir << "\n";
    return 0;
}

int cmd_colorize(const GlobalOpts&, const std::string& in_path, const std::string& out_path,
                 const std::string& colormap_name, double min_v, double max_v, bool minmax_set,
                 bool inverse) {
    const auto [map, header] = read_raster(in_path);

    ColorizeOptions opts;
    opts.map = colormap_from_name(colormap_name);
    opts.inverse = inverse;
    if (minmax_set) {
        opts.min_value = min_v;
        opts.max_value = max_v;
    } else {
        bool any = false;
        for (size_t i = 0; i < map.values.size(); ++i) {
            if (!map.valid[i]) continue;
            if (!any) {
                opts.min_value = opts.max_value = map.values[i];
                any = true;
            } else {
                opts.min_value = std::min(opts.min_value, map.values[i]);
                opts.max_value = std::max(opts.max_value, map.values[i]);
            }
        }
        if (!any) throw std::invalid_argument("colorize: map has no valid pixels");
    }

    write_png_rgb8(out_path, map.width, map.height, colorize(map, opts));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LiDAR -> 360° depth ground-truth toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts global;
    app.add_option("--config", global.config_path, "pipeline config file (key = value)");
    app.add_option("--seed", global.seed, "seed for randomized steps")
        ->each([&](const std::string&) { global.seed_set = true; });
    app.add_option("--workers", global.workers, "worker threads for frame-parallel commands");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit LiDAR->camera extrinsics to correspondences");
    std::string cal_corrs, cal_out = "calibration.json", cal_rot, cal_trans;
    cal->add_option("--corrs", cal_corrs, "correspondence file (lx ly lz px py)")->required();
    cal->add_option("--out", cal_out, "calibration report (JSON)");
    cal->add_option("--init-rotation", cal_rot, "initial axis-angle guess rx,ry,rz");
    cal->add_option("--init-translation", cal_trans, "initial translation guess tx,ty,tz");

    // project
    auto* proj = app.add_subcommand("project", "project point cloud(s) to a sparse depth map");
    std::string proj_cloud, proj_out, proj_extr, proj_rot, proj_trans;
    bool proj_png = false;
    proj->add_option("--cloud", proj_cloud, "point cloud file or directory")->required();
    proj->add_option("--out", proj_out, "output raster file or directory")->required();
    proj->add_option("--extrinsics", proj_extr, "calibration report JSON");
    proj->add_option("--rotation", proj_rot, "extrinsics rotation rx,ry,rz (axis-angle)");
    proj->add_option("--translation", proj_trans, "extrinsics translation tx,ty,tz");
    proj->add_flag("--png16", proj_png, "write 16-bit PNG (meters * 256) instead of .pdr");

    // complete
    auto* comp = app.add_subcommand("complete", "densify sparse maps from a cloud sequence");
    std::string comp_clouds, comp_maps, comp_out, comp_mode = "no_movement", comp_transforms;
    comp->add_option("--clouds", comp_clouds, "directory of per-frame point clouds")->required();
    comp->add_option("--maps", comp_maps, "directory of per-frame sparse maps")->required();
    comp->add_option("--out", comp_out, "output directory")->required();
    comp->add_option("--mode", comp_mode, "temporal aggregation: no_movement | transformed")
        ->check(CLI::IsMember({"no_movement", "transformed"}));
    comp->add_option("--transforms", comp_transforms,
                     "per-frame rigid transforms (rx ry rz tx ty tz)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "benchmark metrics for prediction/gt raster sets");
    std::string ev_pred, ev_gt, ev_completed, ev_tags, ev_out;
    bool ev_lrce = false, ev_pooled = false;
    ev->add_option("--pred", ev_pred, "directory of predicted maps")->required();
    ev->add_option("--gt", ev_gt, "directory of ground-truth maps")->required();
    ev->add_option("--completed-gt", ev_completed, "directory of completed gt maps (for LRCE)");
    ev->add_flag("--lrce", ev_lrce, "also compute the left-right consistency error");
    ev->add_option("--tags", ev_tags, "scene tag sidecar: '<filename> <tag>' per line");
    ev->add_option("--out", ev_out, "report path (stdout when omitted)");
    ev->add_flag("--pooled", ev_pooled, "pool pixels across images instead of per-image means");

    // convert
    auto* conv = app.add_subcommand("convert", "depth <-> disparity per-pixel conversion");
    std::string conv_in, conv_out, conv_to, conv_dtype = "f32";
    conv->add_option("--in", conv_in, "input raster")->required();
    conv->add_option("--out", conv_out, "output raster")->required();
    conv->add_option("--to", conv_to, "target channel: depth | disparity")->required();
    conv->add_option("--dtype", conv_dtype, "payload precision: f32 | f64")
        ->check(CLI::IsMember({"f32", "f64"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "render a synthetic scene with the rig");
    std::string sim_scene, sim_out, sim_motion, sim_dtype = "f32";
    int sim_frames = 1, sim_corrs = 0;
    double sim_noise = 0.0, sim_drift = 0.1;
    bool sim_binary = false;
    sim->add_option("--scene", sim_scene, "scene description file")->required();
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--frames", sim_frames, "number of frames")->check(CLI::PositiveNumber);
    sim->add_option("--motion", sim_motion, "rig translation per frame dx,dy,dz");
    sim->add_option("--azimuth-drift", sim_drift,
                    "LiDAR encoder phase drift per frame, degrees (0 repeats the exact grid)");
    sim->add_option("--corrs", sim_corrs, "also write this many calibration correspondences");
    sim->add_option("--noise", sim_noise, "pixel noise sigma for correspondences");
    sim->add_flag("--binary-clouds", sim_binary, "write .pcb instead of .xyz clouds");
    sim->add_option("--dtype", sim_dtype, "raster payload precision: f32 | f64")
        ->check(CLI::IsMember({"f32", "f64"}));

    // colorize
    auto* col = app.add_subcommand("colorize", "render a raster to an 8-bit PNG");
    std::string col_in, col_out, col_map = "viridis";
    double col_min = 0.0, col_max = 0.0;
    bool col_inverse = false;
    col->add_option("--in", col_in, "input raster")->required();
    col->add_option("--out", col_out, "output PNG")->required();
    col->add_option("--colormap", col_map, "gray | viridis");
    auto* col_min_opt = col->add_option("--min", col_min, "normalization minimum");
    auto* col_max_opt = col->add_option("--max", col_max, "normalization maximum");
    col_min_opt->needs(col_max_opt);
    col_max_opt->needs(col_min_opt);
    col->add_flag("--inverse", col_inverse, "inverse-depth normalization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*cal) return cmd_calibrate(global, cal_corrs, cal_out, cal_rot, cal_trans);
        if (*proj)
            return cmd_project(global, proj_cloud, proj_out, proj_extr, proj_rot, proj_trans,
                               proj_png);
        if (*comp)
            return cmd_complete(global, comp_clouds, comp_maps, comp_out, comp_mode,
                                comp_transforms);
        if (*ev)
            return cmd_evaluate(global, ev_pred, ev_gt, ev_completed, ev_lrce, ev_tags, ev_out,
                                ev_pooled);
        if (*conv) return cmd_convert(global, conv_in, conv_out, conv_to, conv_dtype);
        if (*sim)
            return cmd_simulate(global, sim_scene, sim_out, sim_frames, sim_motion, sim_drift,
                                sim_corrs, sim_noise, sim_binary, sim_dtype);
        if (*col) {
            const bool minmax_set = col_min_opt->count() > 0 || col_max_opt->count() > 0;
            return cmd_colorize(global, col_in, col_out, col_map, col_min, col_max, minmax_set,
                                col_inverse);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
