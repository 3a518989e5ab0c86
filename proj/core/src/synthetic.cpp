#include "panodepth/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "panodepth/random.hpp"

namespace panodepth {

namespace {

constexpr double kRayEps = 1e-9;  // ignore hits closer than this (self-hits)

void consider(std::optional<double>& best, double t) {
    if (t > kRayEps && (!best || t < *best)) best = t;
}

void hit_plane(const Vec3& o, const Vec3& d, const GroundPlane& p, std::optional<double>& best) {
    if (d.z == 0.0) return;
    consider(best, (p.height - o.z) / d.z);
}

void hit_sphere(const Vec3& o, const Vec3& d, const Sphere& s, std::optional<double>& best) {
    const Vec3 oc = o - s.center;
    const double b = oc.dot(d);
    const double c = oc.dot(oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    consider(best, -b - sq);
    consider(best, -b + sq);
}

void hit_box(const Vec3& o, const Vec3& d, const Box& box, std::optional<double>& best) {
    const Vec3 lo = box.center - box.size * 0.5;
    const Vec3 hi = box.center + box.size * 0.5;
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double os[3] = {o.x, o.y, o.z};
    const double ds[3] = {d.x, d.y, d.z};
    const double los[3] = {lo.x, lo.y, lo.z};
    const double his[3] = {hi.x, hi.y, hi.z};
    for (int a = 0; a < 3; ++a) {
        if (ds[a] == 0.0) {
            if (os[a] < los[a] || os[a] > his[a]) return;
            continue;
        }
        double t0 = (los[a] - os[a]) / ds[a];
        double t1 = (his[a] - os[a]) / ds[a];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::fmax(tmin, t0);
        tmax = std::fmin(tmax, t1);
        if (tmin > tmax) return;
    }
    consider(best, tmin);
    consider(best, tmax);
}

void hit_cylinder(const Vec3& o, const Vec3& d, const VerticalCylinder& cyl,
                  std::optional<double>& best) {
    // lateral surface
    const double ox = o.x - cyl.cx, oy = o.y - cyl.cy;
    const double a = d.x * d.x + d.y * d.y;
    if (a > 0.0) {
        const double b = ox * d.x + oy * d.y;
        const double c = ox * ox + oy * oy - cyl.radius * cyl.radius;
        const double disc = b * b - a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double t : {(-b - sq) / a, (-b + sq) / a}) {
                const double z = o.z + t * d.z;
                if (z >= cyl.z_min && z <= cyl.z_max) consider(best, t);
            }
        }
    }
    // caps
    if (d.z != 0.0) {
        for (double zc : {cyl.z_min, cyl.z_max}) {
            const double t = (zc - o.z) / d.z;
            const double x = o.x + t * d.x - cyl.cx;
            const double y = o.y + t * d.y - cyl.cy;
            if (x * x + y * y <= cyl.radius * cyl.radius) consider(best, t);
        }
    }
}

}  // namespace

std::optional<double> raycast(const Vec3& origin, const Vec3& dir, const Scene& scene) {
    std::optional<double> best;
    for (const auto& p : scene.planes) hit_plane(origin, dir, p, best);
    for (const auto& s : scene.spheres) hit_sphere(origin, dir, s, best);
    for (const auto& b : scene.boxes) hit_box(origin, dir, b, best);
    for (const auto& c : scene.cylinders) hit_cylinder(origin, dir, c, best);
    return best;
}

PointCloud render_lidar(const Scene& scene, const SimRig& rig, const Vec3& rig_origin,
                        int frame_index, double azimuth_phase_deg) {
    const Vec3 origin = rig_origin + rig.lidar_center();
    const double dtheta = rig.lidar.fov_v_deg / rig.lidar.n_beams;
    const double dphi = rig.lidar.fov_h_deg / rig.lidar.n_channels_h;
    const double theta0 = 90.0 - rig.lidar.fov_v_deg / 2.0;

    PointCloud cloud;
    cloud.frame_index = frame_index;
    cloud.points.reserve(size_t(rig.lidar.n_beams) * rig.lidar.n_channels_h);
    for (int b = 0; b < rig.lidar.n_beams; ++b) {
        const double theta = theta0 + (b + 0.5) * dtheta;
        for (int c = 0; c < rig.lidar.n_channels_h; ++c) {
            const double phi =
                normalize_phi_deg(-180.0 + (c + 0.5) * dphi + azimuth_phase_deg);
            const Vec3 dir = spherical_to_cart({1.0, theta, phi});
            if (const auto t = raycast(origin, dir, scene))
                cloud.points.push_back({*t, theta, phi});
        }
    }
    return cloud;
}

DepthMap render_depth_map(const Scene& scene, const Vec3& camera_center,
                          const EquirectGeometry& geom) {
    geom.validate();
    DepthMap map(geom.width, geom.height, MapKind::depth);
    for (int y = 0; y < geom.height; ++y)
        for (int x = 0; x < geom.width; ++x) {
            const SphericalPoint sp =
                pixel_to_spherical_direction({x + 0.5, y + 0.5}, geom);
            if (const auto t = raycast(camera_center, spherical_to_cart(sp), scene))
                map.set(x, y, *t);
        }
    return map;
}

DisparityMap gt_disparity_map(const DepthMap& bottom_depth, const EquirectGeometry& geom,
                              double baseline_m) {
    if (bottom_depth.width != geom.width || bottom_depth.height != geom.height)
        throw std::invalid_argument("gt_disparity_map: map dimensions disagree with geometry");
    DisparityMap disp(geom.width, geom.height, MapKind::disparity);
    for (int y = 0; y < geom.height; ++y) {
        const double theta = geom.row_theta_deg(y);
        for (int x = 0; x < geom.width; ++x)
            if (bottom_depth.is_valid(x, y))
                disp.set(x, y, depth_to_disparity(bottom_depth.at(x, y), theta, baseline_m));
    }
    return disp;
}

std::vector<Correspondence> make_correspondences(const Scene& scene, const SimRig& rig,
                                                 const Extrinsics& extr_true, int n,
                                                 double noise_px, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_correspondences: n must be >= 1");
    const PointCloud cloud = render_lidar(scene, rig, {0, 0, 0});
    if (int(cloud.points.size()) < n)
        throw std::invalid_argument("make_correspondences: scene yields fewer hits than n");

    std::mt19937_64 rng(seed);

    // seeded partial Fisher-Yates pick of n distinct hits
    std::vector<uint32_t> order(cloud.points.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = uint32_t(i);
    for (int i = 0; i < n; ++i) {
        const size_t j = i + size_t(rng() % (order.size() - i));
        std::swap(order[i], order[j]);
    }

    const Mat3 rot = extr_true.rotation_matrix();
    std::vector<Correspondence> corrs;
    corrs.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 p_lidar = spherical_to_cart(cloud.points[order[i]]);
        const Vec3 p_cam = rot * p_lidar + extr_true.translation;
        PixelCoord px = spherical_to_pixel(cart_to_spherical(p_cam), rig.camera_raster);
        if (noise_px > 0.0) {
            px.x += noise_px * gaussian(rng);
            px.y += noise_px * gaussian(rng);
            // keep the observation on the raster; the seam wraps horizontally
            px.x = std::fmod(px.x + rig.camera_raster.width, double(rig.camera_raster.width));
            px.y = std::clamp(px.y, 0.0, double(rig.camera_raster.height));
        }
        corrs.push_back({p_lidar, px});
    }
    return corrs;
}

}  // namespace panodepth
