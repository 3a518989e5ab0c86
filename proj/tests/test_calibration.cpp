#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "panodepth/calibration.hpp"
#include "panodepth/random.hpp"

using namespace panodepth;

namespace {
const EquirectGeometry kFull = EquirectGeometry::full_sphere(1920, 960);
const EquirectGeometry kCrop{1920, 512, 48.0, 144.0};

Extrinsics random_perturbation(std::mt19937_64& rng, double max_angle_deg, double max_shift_m) {
    Vec3 axis{gaussian(rng), gaussian(rng), gaussian(rng)};
    axis = axis.normalized();
    const double angle = deg_to_rad(max_angle_deg) * uniform_double(rng);
    Vec3 shift{gaussian(rng), gaussian(rng), gaussian(rng)};
    shift = shift.normalized() * (max_shift_m * uniform_double(rng));
    return {axis * angle, shift};
}
}  // namespace

TEST_CASE("transform_point applies the rigid motion") {
    const Extrinsics lift{{0, 0, 0}, {0, 0, 0.45}};
    const Vec3 p = transform_point({1, 0, 0}, lift);
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(0.45));

    const Extrinsics ident{};
    const Vec3 q = transform_point({0.3, -0.7, 2.0}, ident);
    CHECK(q.x == doctest::Approx(0.3));
    CHECK(q.y == doctest::Approx(-0.7));
    CHECK(q.z == doctest::Approx(2.0));

    const Extrinsics quarter{{0, 0, kPi / 2}, {0, 0, 0}};
    const Vec3 r = transform_point({1, 0, 0}, quarter);
    CHECK(r.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.y == doctest::Approx(1.0));
    CHECK(r.z == doctest::Approx(0.0));
}

TEST_CASE("axis-angle <-> matrix round trip") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        Vec3 axis{gaussian(rng), gaussian(rng), gaussian(rng)};
        axis = axis.normalized();
        const double angle = uniform_double(rng) * (kPi - 0.05);
        const Vec3 aa = axis * angle;

        const Mat3 rot = rotation_from_axis_angle(aa);
        CHECK(std::fabs(rot.determinant() - 1.0) < 1e-10);
        const Mat3 should_be_eye = rot * rot.transposed();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(std::fabs(should_be_eye(r, c) - (r == c ? 1.0 : 0.0)) < 1e-10);

        const Vec3 back = axis_angle_from_rotation(rot);
        CHECK((back - aa).norm() < 1e-10);
    }
    // zero rotation
    CHECK(axis_angle_from_rotation(rotation_from_axis_angle({0, 0, 0})).norm() == 0.0);
}

TEST_CASE("reproject composes transform, spherical conversion and projection") {
    const Extrinsics ident{};
    const PixelCoord px = reproject({3.0, 0, 0}, ident, kFull);
    CHECK(px.x == doctest::Approx(960.0));
    CHECK(px.y == doctest::Approx(480.0));

    const PixelCoord pole = reproject({0, 0, 2.0}, ident, kFull);
    CHECK(pole.y == doctest::Approx(0.0));

    CHECK_THROWS_AS(reproject({0, 0, 0}, ident, kFull), std::invalid_argument);
    // polar angle outside the cropped band
    CHECK_THROWS_AS(reproject({0, 0, 2.0}, ident, kCrop), std::invalid_argument);

    // pure translation along z keeps the azimuth of any point
    const Extrinsics lifted{{0, 0, 0}, {0, 0, 0.45}};
    for (double phi : {-120.0, -30.0, 60.0, 150.0}) {
        const Vec3 p = spherical_to_cart({4.0, 75.0, phi});
        const PixelCoord a = reproject(p, ident, kFull);
        const PixelCoord b = reproject(p, lifted, kFull);
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
        CHECK(a.y != doctest::Approx(b.y));  // the polar angle does move
    }
}

TEST_CASE("residuals use wrap-aware pixel distance") {
    const Extrinsics ident{};
    // a point that lands exactly on (10, 10)
    const Vec3 p = spherical_to_cart(pixel_to_spherical_direction({10, 10}, kFull));

    std::vector<Correspondence> corrs{{p, {13.0, 14.0}}};
    const auto errs = residuals(corrs, ident, kFull);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0] == doctest::Approx(5.0).epsilon(1e-9));  // 3-4-5 triangle

    corrs[0].image_point = reproject(p, ident, kFull);
    CHECK(residuals(corrs, ident, kFull)[0] == doctest::Approx(0.0));

    // seam: projected near x=1, observed near x=W-1, two columns apart
    const Vec3 seam = spherical_to_cart(pixel_to_spherical_direction({1.0, 480.0}, kFull));
    std::vector<Correspondence> wrap{{seam, {1919.0, 480.0}}};
    CHECK(residuals(wrap, ident, kFull)[0] == doctest::Approx(2.0).epsilon(1e-9));

    CHECK_THROWS_AS(residuals({}, ident, kFull), std::invalid_argument);
}

TEST_CASE("residuals are invariant under a full azimuth turn of the observation") {
    const Extrinsics ident{};
    const Vec3 p = spherical_to_cart({5.0, 80.0, 170.0});
    const PixelCoord obs = reproject(p, ident, kFull);
    std::vector<Correspondence> a{{p, {obs.x + 3.0, obs.y}}};
    std::vector<Correspondence> b{{p, {obs.x + 3.0 + kFull.width, obs.y}}};
    CHECK(residuals(a, ident, kFull)[0] ==
          doctest::Approx(residuals(b, ident, kFull)[0]).epsilon(1e-12));
}

TEST_CASE("optimize_extrinsics returns the initial guess when already optimal") {
    const SimRig rig = testutil::make_rig();
    const Extrinsics truth = rig.true_extrinsics();
    const auto corrs =
        make_correspondences(testutil::make_room_scene(), rig, truth, 40, 0.0, 99);

    const CalibrationResult res = optimize_extrinsics(corrs, truth, rig.camera_raster);
    CHECK(res.total_error == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(res.total_error <= res.initial_error);
    CHECK((res.extrinsics.translation - truth.translation).norm() < 1e-6);
}

TEST_CASE("optimize_extrinsics recovers a perturbed rig from exact correspondences") {
    const SimRig rig = testutil::make_rig();
    const Extrinsics truth = rig.true_extrinsics();
    const auto corrs =
        make_correspondences(testutil::make_room_scene(), rig, truth, 60, 0.0, 1234);

    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 3; ++trial) {
        const Extrinsics bump = random_perturbation(rng, 2.0, 0.05);
        const Extrinsics init{truth.rotation + bump.rotation,
                              truth.translation + bump.translation};
        const CalibrationResult res = optimize_extrinsics(corrs, init, rig.camera_raster);
        CHECK(res.total_error <= res.initial_error);
        double mean = 0.0;
        for (double e : res.per_point_errors) mean += e;
        mean /= double(res.per_point_errors.size());
        CHECK(mean < 0.1);
        CHECK(res.converged);
    }
}

TEST_CASE("optimize_extrinsics tolerates observation noise") {
    const SimRig rig = testutil::make_rig();
    const Extrinsics truth = rig.true_extrinsics();
    const auto corrs =
        make_correspondences(testutil::make_room_scene(), rig, truth, 30, 1.0, 4321);

    const Extrinsics init{truth.rotation + Vec3{0.01, -0.02, 0.015},
                          truth.translation + Vec3{0.03, -0.02, 0.04}};
    const CalibrationResult res = optimize_extrinsics(corrs, init, rig.camera_raster);
    CHECK(res.total_error <= res.initial_error);
    double mean = 0.0;
    for (double e : res.per_point_errors) mean += e;
    mean /= double(res.per_point_errors.size());
    CHECK(mean <= 1.5);
}

TEST_CASE("optimize_extrinsics rejects degenerate input") {
    const SimRig rig = testutil::make_rig();
    std::vector<Correspondence> two{{{1, 0, 0}, {10, 10}}, {{0, 1, 0}, {20, 20}}};
    CHECK_THROWS_AS(optimize_extrinsics(two, {}, rig.camera_raster), std::invalid_argument);
}

TEST_CASE("projection_quality_report normalizes by the diagonal") {
    const auto one = projection_quality_report({{{10, 10}, {13, 14}}}, kCrop);
    CHECK(one.avg_pixel_error == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(one.relative_error_percent == doctest::Approx(0.251624).epsilon(1e-4));

    const auto zero = projection_quality_report({{{10, 10}, {10, 10}}, {{5, 5}, {5, 5}}}, kCrop);
    CHECK(zero.avg_pixel_error == doctest::Approx(0.0));
    CHECK(zero.relative_error_percent == doctest::Approx(0.0));

    // an 8 px average error on the dataset raster is 0.40 % of the diagonal
    const auto eight = projection_quality_report({{{0, 0}, {8, 0}}}, kCrop);
    CHECK(eight.relative_error_percent == doctest::Approx(0.40).epsilon(1e-2));

    CHECK_THROWS_AS(projection_quality_report({}, kCrop), std::invalid_argument);
}
