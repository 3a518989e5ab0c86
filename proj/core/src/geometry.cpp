#include "panodepth/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace panodepth {

double normalize_phi_deg(double phi_deg) {
    double p = std::fmod(phi_deg + 180.0, 360.0);
    if (p < 0.0) p += 360.0;
    return p - 180.0;
}

Vec3 Vec3::normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero-length vector");
    return {x / n, y / n, z / n};
}

Vec3 Mat3::operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
            out(r, c) = s;
        }
    return out;
}

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
}

double Mat3::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 rotation_from_axis_angle(const Vec3& axis_angle) {
    const double angle = axis_angle.norm();
    double kx, ky, kz;
    double s, c1;  // sin(angle)/angle and (1-cos(angle))/angle^2, times angle factors below
    if (angle < 1e-12) {
        // second-order Taylor keeps the map smooth through zero
        kx = axis_angle.x;
        ky = axis_angle.y;
        kz = axis_angle.z;
        s = 1.0 - angle * angle / 6.0;
        c1 = 0.5 - angle * angle / 24.0;
    } else {
        kx = axis_angle.x;
        ky = axis_angle.y;
        kz = axis_angle.z;
        s = std::sin(angle) / angle;
        c1 = (1.0 - std::cos(angle)) / (angle * angle);
    }
    // R = I + s*K + c1*K^2 with K the cross-product matrix of axis_angle
    Mat3 r;
    r(0, 0) = 1.0 + c1 * (-kz * kz - ky * ky);
    r(0, 1) = -s * kz + c1 * kx * ky;
    r(0, 2) = s * ky + c1 * kx * kz;
    r(1, 0) = s * kz + c1 * kx * ky;
    r(1, 1) = 1.0 + c1 * (-kx * kx - kz * kz);
    r(1, 2) = -s * kx + c1 * ky * kz;
    r(2, 0) = -s * ky + c1 * kx * kz;
    r(2, 1) = s * kx + c1 * ky * kz;
    r(2, 2) = 1.0 + c1 * (-kx * kx - ky * ky);
    return r;
}

Vec3 axis_angle_from_rotation(const Mat3& rot) {
    double cos_angle = (rot.trace() - 1.0) * 0.5;
    cos_angle = std::fmin(1.0, std::fmax(-1.0, cos_angle));
    const double angle = std::acos(cos_angle);
    if (angle < 1e-12) return {0, 0, 0};
    const Vec3 skew{rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0), rot(1, 0) - rot(0, 1)};
    if (angle < kPi - 1e-6) {
        const double k = angle / (2.0 * std::sin(angle));
        return skew * k;
    }
    // near pi the skew part vanishes; recover the axis from the diagonal
    Vec3 axis{std::sqrt(std::fmax(0.0, (rot(0, 0) + 1.0) * 0.5)),
              std::sqrt(std::fmax(0.0, (rot(1, 1) + 1.0) * 0.5)),
              std::sqrt(std::fmax(0.0, (rot(2, 2) + 1.0) * 0.5))};
    // fix signs against the off-diagonal sums
    if (rot(0, 1) + rot(1, 0) < 0) axis.y = -axis.y;
    if (rot(0, 2) + rot(2, 0) < 0) axis.z = -axis.z;
    if (skew.x < 0) axis = axis * -1.0;
    return axis.normalized() * angle;
}

Mat3 RigidTransform::rotation_matrix() const { return rotation_from_axis_angle(rotation); }

Vec3 RigidTransform::apply(const Vec3& p) const { return rotation_matrix() * p + translation; }

RigidTransform RigidTransform::inverse() const {
    const Mat3 rt = rotation_matrix().transposed();
    return {rotation * -1.0, (rt * translation) * -1.0};
}

void EquirectGeometry::validate() const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("equirect geometry requires positive width and height");
    if (!(theta_min_deg >= 0.0 && theta_min_deg < theta_max_deg && theta_max_deg <= 180.0))
        throw std::invalid_argument("equirect geometry requires 0 <= theta_min < theta_max <= 180");
}

SphericalPoint cart_to_spherical(const Vec3& p) {
    const double r = p.norm();
    if (r == 0.0) throw std::invalid_argument("cart_to_spherical: zero-length vector");
    double ct = p.z / r;
    ct = std::fmin(1.0, std::fmax(-1.0, ct));
    const double theta = rad_to_deg(std::acos(ct));
    double phi = 0.0;
    if (p.x != 0.0 || p.y != 0.0) phi = normalize_phi_deg(rad_to_deg(std::atan2(p.y, p.x)));
    return {r, theta, phi};
}

Vec3 spherical_to_cart(const SphericalPoint& sp) {
    const double th = deg_to_rad(sp.theta_deg);
    const double ph = deg_to_rad(sp.phi_deg);
    const double st = std::sin(th);
    return {sp.r * st * std::cos(ph), sp.r * st * std::sin(ph), sp.r * std::cos(th)};
}

bool theta_in_band(double theta_deg, const EquirectGeometry& geom) {
    return theta_deg >= geom.theta_min_deg && theta_deg <= geom.theta_max_deg;
}

PixelCoord spherical_to_pixel_unchecked(const SphericalPoint& sp, const EquirectGeometry& geom) {
    const double x = (sp.phi_deg + 180.0) / 360.0 * geom.width;
    const double y = (sp.theta_deg - geom.theta_min_deg) / geom.theta_span() * geom.height;
    return {x, y};
}

PixelCoord spherical_to_pixel(const SphericalPoint& sp, const EquirectGeometry& geom) {
    if (!theta_in_band(sp.theta_deg, geom))
        throw std::invalid_argument("spherical_to_pixel: polar angle outside the raster band");
    return spherical_to_pixel_unchecked(sp, geom);
}

SphericalPoint pixel_to_spherical_direction(const PixelCoord& px, const EquirectGeometry& geom) {
    if (!(px.x >= 0.0 && px.x <= geom.width && px.y >= 0.0 && px.y <= geom.height))
        throw std::invalid_argument("pixel_to_spherical_direction: coordinate outside the raster");
    const double phi = px.x / geom.width * 360.0 - 180.0;
    const double theta = geom.theta_min_deg + px.y / geom.height * geom.theta_span();
    return {1.0, theta, phi};
}

double depth_to_disparity(double r_m, double theta_b_deg, double baseline_m) {
    if (r_m <= 0.0) throw std::invalid_argument("depth_to_disparity: depth must be positive");
    if (baseline_m <= 0.0) throw std::invalid_argument("depth_to_disparity: baseline must be positive");
    if (!(theta_b_deg > 0.0 && theta_b_deg < 180.0))
        throw std::invalid_argument("depth_to_disparity: polar angle must lie in (0, 180)");
    const double th = deg_to_rad(theta_b_deg);
    // atan2 keeps the result in (0, 180) when the denominator crosses zero
    return rad_to_deg(std::atan2(std::sin(th), r_m / baseline_m - std::cos(th)));
}

DepthFromDisparity disparity_to_depth(double d_deg, double theta_b_deg, double baseline_m,
                                      const DisparityClamp& clamp) {
    if (!(theta_b_deg > 0.0 && theta_b_deg < 180.0))
        throw std::invalid_argument("disparity_to_depth: polar angle must lie in (0, 180)");
    if (!(d_deg > 0.0 && d_deg < 180.0))
        throw std::invalid_argument("disparity_to_depth: disparity must lie in (0, 180)");
    DepthFromDisparity out;
    double d = d_deg;
    // only the low side is clamped: d -> 0 sends the depth to infinity
    if (d < clamp.min_deg) {
        d = clamp.min_deg;
        out.clamped = true;
    }
    const double th = deg_to_rad(theta_b_deg);
    const double dr = deg_to_rad(d);
    const double r = baseline_m * (std::cos(th) + std::sin(th) / std::tan(dr));
    if (r <= 0.0) throw std::invalid_argument("disparity_to_depth: non-positive depth");
    out.depth_m = r;
    return out;
}

double disparity_deg_to_pixels(double d_deg, double full_height_px) {
    return full_height_px * d_deg / 180.0;
}

int next_multiple_above(double x, int multiple) {
    if (multiple <= 0) throw std::invalid_argument("next_multiple_above: multiple must be positive");
    int n = int(std::floor(x / multiple)) + 1;
    if (n < 1) n = 1;
    return n * multiple;
}

Image<float> polar_angle_map(const EquirectGeometry& geom) {
    geom.validate();
    Image<float> img(geom.width, geom.height);
    for (int y = 0; y < geom.height; ++y) {
        const float theta = float(geom.row_theta_deg(y));
        for (int x = 0; x < geom.width; ++x) img.at(x, y) = theta;
    }
    return img;
}

template <class T>
Image<T> circular_pad(const Image<T>& img, int pad) {
    if (pad < 0 || pad > img.width)
        throw std::invalid_argument("circular_pad: padding must lie in [0, width]");
    Image<T> out(img.width + 2 * pad, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int j = 0; j < out.width; ++j)
            out.at(j, y) = img.at((j + img.width - pad) % img.width, y);
    return out;
}

template Image<float> circular_pad(const Image<float>&, int);
template Image<double> circular_pad(const Image<double>&, int);
template Image<unsigned char> circular_pad(const Image<unsigned char>&, int);

}  // namespace panodepth
