#pragma once

// Spherical/equirectangular geometry for a top-bottom 360° stereo rig.
//
// Conventions used throughout the library:
//   - right-handed frame, z up; polar angle theta is measured from +z,
//     azimuth phi = atan2(y, x)
//   - angles are stored in degrees (theta in [0,180], phi in [-180,180));
//     trig is converted locally
//   - continuous raster coordinates are corner-referenced: x in [0,W],
//     y in [0,H]; the center of pixel (i,j) sits at (i+0.5, j+0.5)

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace panodepth {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Reduce an azimuth to the canonical interval [-180, 180).
double normalize_phi_deg(double phi_deg);

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const;
};

struct Mat3 {
    // row-major
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }
    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }
    Vec3 operator*(const Vec3& v) const;
    Mat3 operator*(const Mat3& o) const;
    Mat3 transposed() const;
    double trace() const { return m[0] + m[4] + m[8]; }
    double determinant() const;
};

/// Rigid motion parameterized by a 3-vector axis-angle rotation
/// (radians times unit axis, |rotation| < pi) plus a translation in meters.
struct RigidTransform {
    Vec3 rotation;     // axis-angle, radians
    Vec3 translation;  // meters

    Mat3 rotation_matrix() const;
    Vec3 apply(const Vec3& p) const;
    RigidTransform inverse() const;
};

Mat3 rotation_from_axis_angle(const Vec3& axis_angle);
Vec3 axis_angle_from_rotation(const Mat3& rot);

struct SphericalPoint {
    double r = 0.0;          // radial distance, meters
    double theta_deg = 0.0;  // polar angle from +z, [0, 180]
    double phi_deg = 0.0;    // azimuth, [-180, 180)
};

struct PixelCoord {
    double x = 0.0;  // column, continuous
    double y = 0.0;  // row, continuous
};

/// Equirectangular raster: azimuth maps linearly to columns over the full
/// 360°, the polar band [theta_min_deg, theta_max_deg] maps linearly to rows.
struct EquirectGeometry {
    int width = 0;
    int height = 0;
    double theta_min_deg = 0.0;
    double theta_max_deg = 180.0;

    static EquirectGeometry full_sphere(int w, int h) { return {w, h, 0.0, 180.0}; }

    double theta_span() const { return theta_max_deg - theta_min_deg; }
    /// Polar angle of the center of row `row`.
    double row_theta_deg(int row) const {
        return theta_min_deg + (row + 0.5) / height * theta_span();
    }
    void validate() const;  // throws std::invalid_argument on bad fields
};

/// Physical constants of the camera/LiDAR stack.
struct RigGeometry {
    double baseline_m = 0.191;      // top-bottom camera separation
    double lidar_offset_m = 0.450;  // LiDAR mounted this far below the bottom camera
};

SphericalPoint cart_to_spherical(const Vec3& p);
Vec3 spherical_to_cart(const SphericalPoint& sp);

bool theta_in_band(double theta_deg, const EquirectGeometry& geom);

/// Projects to continuous raster coordinates; throws if theta is outside the
/// geometry's polar band.
PixelCoord spherical_to_pixel(const SphericalPoint& sp, const EquirectGeometry& geom);

/// Same mapping without the band check: rows extrapolate linearly beyond
/// [0, H]. Used where a smooth objective matters more than raster validity.
PixelCoord spherical_to_pixel_unchecked(const SphericalPoint& sp, const EquirectGeometry& geom);

/// Inverse projection; returns a unit-radius direction. Throws if (x, y) is
/// outside [0, W] x [0, H].
SphericalPoint pixel_to_spherical_direction(const PixelCoord& px, const EquirectGeometry& geom);

/// Spherical disparity in degrees between the top and bottom camera rays of a
/// point at bottom-camera range r and polar angle theta_b.
double depth_to_disparity(double r_m, double theta_b_deg, double baseline_m);

struct DisparityClamp {
    double min_deg = 0.048;
    double max_deg = 23.0;
};

struct DepthFromDisparity {
    double depth_m = 0.0;
    bool clamped = false;  // disparity fell outside the clamp and was pulled in
};

/// Algebraic inverse of depth_to_disparity. Disparities outside the clamp are
/// evaluated at the nearest clamp edge and flagged; a non-positive resulting
/// depth throws.
DepthFromDisparity disparity_to_depth(double d_deg, double theta_b_deg, double baseline_m,
                                      const DisparityClamp& clamp = {});

/// Degree-to-pixel disparity scaling; full_height_px is the equirectangular
/// height covering the full 180° polar range.
double disparity_deg_to_pixels(double d_deg, double full_height_px = 960.0);

/// Smallest positive multiple of `multiple` strictly greater than x.
int next_multiple_above(double x, int multiple);

template <class T>
struct Image {
    int width = 0, height = 0;
    std::vector<T> data;  // row-major

    Image() = default;
    Image(int w, int h, T fill = T{}) : width(w), height(h), data(size_t(w) * h, fill) {}
    T& at(int x, int y) { return data[size_t(y) * width + x]; }
    const T& at(int x, int y) const { return data[size_t(y) * width + x]; }
};

/// Per-pixel polar angle of row centers, every column identical.
Image<float> polar_angle_map(const EquirectGeometry& geom);

/// Horizontal wrap-around padding: output width W + 2P, output column j holds
/// input column (j + W - P) mod W. Throws if P < 0 or P > W.
template <class T>
Image<T> circular_pad(const Image<T>& img, int pad);

extern template Image<float> circular_pad(const Image<float>&, int);
extern template Image<double> circular_pad(const Image<double>&, int);
extern template Image<unsigned char> circular_pad(const Image<unsigned char>&, int);

}  // namespace panodepth
