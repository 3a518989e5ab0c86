#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "panodepth/synthetic.hpp"

using namespace panodepth;

TEST_CASE("raycast intersects each primitive analytically") {
    Scene plane_scene;
    plane_scene.planes.push_back({0.0});
    auto t = raycast({0, 0, 1}, {0, 0, -1}, plane_scene);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(raycast({0, 0, 1}, {0, 0, 1}, plane_scene).has_value());

    Scene sphere_scene;
    sphere_scene.spheres.push_back({{0, 5, 1}, 1.0});
    t = raycast({0, 0, 1}, {0, 1, 0}, sphere_scene);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(4.0).epsilon(1e-14));

    Scene box_scene;
    box_scene.boxes.push_back({{5, 0, 0}, {2, 2, 2}});
    t = raycast({0, 0, 0}, {1, 0, 0}, box_scene);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_FALSE(raycast({0, 0, 5}, {1, 0, 0}, box_scene).has_value());

    Scene cyl_scene;
    cyl_scene.cylinders.push_back({3, 0, -1, 1, 1.0});
    t = raycast({0, 0, 0}, {1, 0, 0}, cyl_scene);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(2.0).epsilon(1e-14));
    // from above, through the top cap
    t = raycast({3, 0, 5}, {0, 0, -1}, cyl_scene);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(4.0).epsilon(1e-14));

    CHECK_FALSE(raycast({0, 0, 0}, {0, 0, 1}, Scene{}).has_value());
}

TEST_CASE("render_lidar sweeps the beam grid") {
    SimRig rig = testutil::make_rig();
    rig.lidar.n_beams = 16;
    rig.lidar.n_channels_h = 64;

    CHECK(render_lidar(Scene{}, rig, {0, 0, 0}).points.empty());

    // sphere centered on the LiDAR: every beam reads the radius
    Scene ball;
    ball.spheres.push_back({{0, 0, -rig.geometry.lidar_offset_m}, 7.5});
    const PointCloud cloud = render_lidar(ball, rig, {0, 0, 0});
    CHECK(cloud.points.size() == 16 * 64);
    for (const auto& p : cloud.points) CHECK(p.r == doctest::Approx(7.5).epsilon(1e-12));

    // ground plane: each beam reads h / cos(angle from nadir)
    Scene ground;
    ground.planes.push_back({-1.6});
    const double h = 1.6 - rig.geometry.lidar_offset_m;  // LiDAR sits at z = -0.45
    const PointCloud floor = render_lidar(ground, rig, {0, 0, 0});
    CHECK_FALSE(floor.points.empty());
    for (const auto& p : floor.points) {
        const double from_nadir = deg_to_rad(180.0 - p.theta_deg);
        CHECK(p.r == doctest::Approx(h / std::cos(from_nadir)).epsilon(1e-12));
    }
}

TEST_CASE("render_depth_map is analytic per pixel") {
    const EquirectGeometry geom{96, 48, 48.0, 144.0};

    Scene ball;
    ball.spheres.push_back({{0, 0, 0}, 3.25});
    const DepthMap constant = render_depth_map(ball, {0, 0, 0}, geom);
    for (int y = 0; y < geom.height; ++y)
        for (int x = 0; x < geom.width; ++x) {
            REQUIRE(constant.is_valid(x, y));
            CHECK(constant.at(x, y) == doctest::Approx(3.25).epsilon(1e-12));
        }

    Scene ground;
    ground.planes.push_back({-1.6});
    const DepthMap floor = render_depth_map(ground, {0, 0, 0}, geom);
    for (int y = 0; y < geom.height; ++y) {
        const double theta = geom.row_theta_deg(y);
        const double dz = std::cos(deg_to_rad(theta));
        for (int x = 0; x < geom.width; ++x) {
            if (dz >= 0.0) {
                CHECK_FALSE(floor.is_valid(x, y));  // looking up, the plane is below
            } else {
                REQUIRE(floor.is_valid(x, y));
                CHECK(floor.at(x, y) == doctest::Approx(-1.6 / dz).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("renders at odd resolution multiples share exact ray directions") {
    // with the pixel-center convention, row centers of H rows reappear among
    // the centers of 3H rows (j = 3i + 1)
    const EquirectGeometry coarse{32, 16, 48.0, 144.0};
    const EquirectGeometry fine{96, 48, 48.0, 144.0};
    const Scene scene = testutil::make_room_scene();
    const DepthMap a = render_depth_map(scene, {0, 0, 0}, coarse);
    const DepthMap b = render_depth_map(scene, {0, 0, 0}, fine);
    for (int y = 0; y < coarse.height; ++y)
        for (int x = 0; x < coarse.width; ++x) {
            REQUIRE(a.is_valid(x, y));
            REQUIRE(b.is_valid(3 * x + 1, 3 * y + 1));
            CHECK(a.at(x, y) == b.at(3 * x + 1, 3 * y + 1));
        }
}

TEST_CASE("gt_disparity_map applies the per-row conversion") {
    // 30 rows over [45, 135] put a row center exactly on the horizon
    const EquirectGeometry geom{8, 30, 45.0, 135.0};
    const int horizon_row = 14;  // 45 + (14 + 0.5) * 3 = 88.5... adjusted below
    REQUIRE(geom.row_theta_deg(horizon_row) == doctest::Approx(88.5));

    DepthMap depth(geom.width, geom.height);
    for (int y = 0; y < geom.height; ++y)
        for (int x = 0; x < geom.width; ++x) depth.set(x, y, 0.191);

    const DisparityMap disp = gt_disparity_map(depth, geom, 0.191);
    for (int y = 0; y < geom.height; ++y) {
        const double expect = depth_to_disparity(0.191, geom.row_theta_deg(y), 0.191);
        for (int x = 0; x < geom.width; ++x)
            CHECK(disp.at(x, y) == doctest::Approx(expect).epsilon(1e-12));
    }

    // a geometry whose row 22 center sits exactly at 90°: constant B reads 45°
    const EquirectGeometry exact{4, 45, 45.0, 135.0};
    REQUIRE(exact.row_theta_deg(22) == doctest::Approx(90.0));
    DepthMap at_b(exact.width, exact.height);
    for (int y = 0; y < exact.height; ++y)
        for (int x = 0; x < exact.width; ++x) at_b.set(x, y, 0.191);
    const DisparityMap disp_b = gt_disparity_map(at_b, exact, 0.191);
    CHECK(disp_b.at(0, 22) == doctest::Approx(45.0).epsilon(1e-12));

    // along a row, disparity strictly decreases as depth increases
    DepthMap ramp(exact.width, exact.height);
    for (int x = 0; x < exact.width; ++x) ramp.set(x, 22, 1.0 + x);
    const DisparityMap ramp_disp = gt_disparity_map(ramp, exact, 0.191);
    for (int x = 1; x < exact.width; ++x)
        CHECK(ramp_disp.at(x, 22) < ramp_disp.at(x - 1, 22));
}

TEST_CASE("make_correspondences pairs hits with exact reprojections") {
    const Scene scene = testutil::make_room_scene();
    const SimRig rig = testutil::make_rig();
    const Extrinsics truth = rig.true_extrinsics();

    const auto exact = make_correspondences(scene, rig, truth, 200, 0.0, 7);
    CHECK(exact.size() == 200);
    const auto errs = residuals(exact, truth, rig.camera_raster);
    for (double e : errs) CHECK(e < 1e-9);

    // seeded runs repeat bit for bit
    const auto again = make_correspondences(scene, rig, truth, 200, 0.0, 7);
    for (size_t i = 0; i < exact.size(); ++i) {
        CHECK(exact[i].lidar_point.x == again[i].lidar_point.x);
        CHECK(exact[i].image_point.x == again[i].image_point.x);
        CHECK(exact[i].image_point.y == again[i].image_point.y);
    }

    CHECK_THROWS_AS(make_correspondences(Scene{}, rig, truth, 10, 0.0, 1),
                    std::invalid_argument);
}

TEST_CASE("correspondence noise has the expected scale") {
    const Scene scene = testutil::make_room_scene();
    const SimRig rig = testutil::make_rig();
    const Extrinsics truth = rig.true_extrinsics();

    const auto noisy = make_correspondences(scene, rig, truth, 1000, 1.0, 99);
    const auto errs = residuals(noisy, truth, rig.camera_raster);
    double sq = 0.0, mean = 0.0;
    for (double e : errs) {
        sq += e * e;
        mean += e;
    }
    const double rms = std::sqrt(sq / double(errs.size()));
    mean /= double(errs.size());
    // per-axis sigma of 1 px: Euclidean RMS sqrt(2), mean sqrt(pi/2)
    CHECK(rms == doctest::Approx(std::sqrt(2.0)).epsilon(0.08));
    CHECK(mean == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(0.08));
}

TEST_CASE("LiDAR cloud and camera depth map describe the same scene") {
    const Scene scene = testutil::make_room_scene();
    SimRig rig = testutil::make_rig(480, 128);
    rig.lidar.n_beams = 32;
    rig.lidar.n_channels_h = 256;
    const Extrinsics truth = rig.true_extrinsics();
    const Mat3 rot = truth.rotation_matrix();

    const PointCloud cloud = render_lidar(scene, rig, {0, 0, 0});
    const DepthMap map = render_depth_map(scene, {0, 0, 0}, rig.camera_raster);

    size_t consistent = 0;
    for (const auto& sp : cloud.points) {
        const Vec3 p_cam = rot * spherical_to_cart(sp) + truth.translation;
        const double range = p_cam.norm();
        const auto t = raycast({0, 0, 0}, p_cam * (1.0 / range), scene);
        REQUIRE(t.has_value());
        // the camera may see an occluder in front of the LiDAR point, never
        // anything farther
        CHECK(*t <= range + 1e-9);
        if (std::fabs(*t - range) < 1e-6) ++consistent;

        const SphericalPoint cam_sp = cart_to_spherical(p_cam);
        if (theta_in_band(cam_sp.theta_deg, rig.camera_raster)) {
            const PixelCoord px = spherical_to_pixel(cam_sp, rig.camera_raster);
            const int ix = std::clamp(int(px.x), 0, rig.camera_raster.width - 1);
            const int iy = std::clamp(int(px.y), 0, rig.camera_raster.height - 1);
            CHECK(map.is_valid(ix, iy));
        }
    }
    // silhouette occlusion affects only a sliver of the points
    CHECK(double(consistent) / double(cloud.points.size()) > 0.95);
}
