#include "panodepth/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace panodepth {

PixelCoord reproject(const Vec3& p, const Extrinsics& extr, const EquirectGeometry& geom) {
    const Vec3 cam = extr.apply(p);
    return spherical_to_pixel(cart_to_spherical(cam), geom);
}

double pixel_distance_wrapped(const PixelCoord& a, const PixelCoord& b, int width) {
    double dx = std::remainder(a.x - b.x, double(width));
    double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<double> residuals(const std::vector<Correspondence>& corrs, const Extrinsics& extr,
                              const EquirectGeometry& geom) {
    if (corrs.empty()) throw std::invalid_argument("residuals: empty correspondence set");
    const Mat3 rot = extr.rotation_matrix();
    std::vector<double> out;
    out.reserve(corrs.size());
    for (const auto& c : corrs) {
        const Vec3 cam = rot * c.lidar_point + extr.translation;
        const PixelCoord proj = spherical_to_pixel_unchecked(cart_to_spherical(cam), geom);
        out.push_back(pixel_distance_wrapped(proj, c.image_point, geom.width));
    }
    return out;
}

namespace {

using Param6 = std::array<double, 6>;

Extrinsics to_extrinsics(const Param6& x) {
    return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
}

double objective(const std::vector<Correspondence>& corrs, const EquirectGeometry& geom,
                 const Param6& x) {
    double e = 0.0;
    for (double r : residuals(corrs, to_extrinsics(x), geom)) e += r * r;
    return e;
}

Param6 fd_gradient(const std::function<double(const Param6&)>& f, const Param6& x, double rel_step) {
    Param6 g{};
    for (int i = 0; i < 6; ++i) {
        const double h = rel_step * (1.0 + std::fabs(x[i]));
        Param6 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

double inf_norm(const Param6& v) {
    double m = 0.0;
    for (double c : v) m = std::fmax(m, std::fabs(c));
    return m;
}

double dot6(const Param6& a, const Param6& b) {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

CalibrationResult optimize_extrinsics(const std::vector<Correspondence>& corrs,
                                      const Extrinsics& init, const EquirectGeometry& geom,
                                      const OptimizeOptions& opts) {
    if (corrs.size() < 3)
        throw std::invalid_argument("optimize_extrinsics: at least 3 correspondences required");
    geom.validate();

    const auto f = [&](const Param6& x) { return objective(corrs, geom, x); };

    Param6 x{init.rotation.x, init.rotation.y, init.rotation.z,
             init.translation.x, init.translation.y, init.translation.z};
    double fx = f(x);

    CalibrationResult result;
    result.initial_error = fx;

    // inverse Hessian approximation, identity start
    std::array<Param6, 6> hinv{};
    for (int i = 0; i < 6; ++i) hinv[i][i] = 1.0;

    Param6 grad = fd_gradient(f, x, opts.fd_step);
    bool converged = inf_norm(grad) < opts.gradient_tolerance;
    int iter = 0;
    bool first_update = true;

    while (!converged && iter < opts.max_iterations) {
        ++iter;

        Param6 dir{};
        for (int i = 0; i < 6; ++i) dir[i] = -dot6(hinv[i], grad);
        if (dot6(dir, grad) >= 0.0) {
            // not a descent direction, reset to steepest descent
            for (int i = 0; i < 6; ++i) {
                hinv[i] = Param6{};
                hinv[i][i] = 1.0;
                dir[i] = -grad[i];
            }
            first_update = true;
        }

        // backtracking line search with Armijo sufficient decrease
        const double slope = dot6(grad, dir);
        double alpha = 1.0;
        Param6 xn = x;
        double fn = fx;
        bool decreased = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < 6; ++i) xn[i] = x[i] + alpha * dir[i];
            fn = f(xn);
            if (fn <= fx + 1e-4 * alpha * slope) {
                decreased = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!decreased) break;  // stall: E would increase past the safeguard

        Param6 step{}, grad_new, yvec{};
        for (int i = 0; i < 6; ++i) step[i] = xn[i] - x[i];
        grad_new = fd_gradient(f, xn, opts.fd_step);
        for (int i = 0; i < 6; ++i) yvec[i] = grad_new[i] - grad[i];

        const double sy = dot6(step, yvec);
        if (sy > 1e-12 * std::sqrt(dot6(step, step) * dot6(yvec, yvec))) {
            if (first_update) {
                // scale the initial inverse Hessian (Nocedal & Wright eq. 6.20)
                const double gamma = sy / dot6(yvec, yvec);
                for (int i = 0; i < 6; ++i) {
                    hinv[i] = Param6{};
                    hinv[i][i] = gamma;
                }
                first_update = false;
            }
            // BFGS inverse update: H' = (I - r s y^T) H (I - r y s^T) + r s s^T
            const double rho = 1.0 / sy;
            Param6 hy{};
            for (int i = 0; i < 6; ++i) hy[i] = dot6(hinv[i], yvec);
            const double yhy = dot6(yvec, hy);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j)
                    hinv[i][j] += rho * rho * yhy * step[i] * step[j] + rho * step[i] * step[j] -
                                  rho * (step[i] * hy[j] + hy[i] * step[j]);
        }

        x = xn;
        fx = fn;
        grad = grad_new;
        if (inf_norm(grad) < opts.gradient_tolerance || inf_norm(step) < opts.step_tolerance) {
            converged = true;
        }
    }

    result.extrinsics = to_extrinsics(x);
    result.total_error = fx;
    result.per_point_errors = residuals(corrs, result.extrinsics, geom);
    result.iterations = iter;
    result.converged = converged;
    return result;
}

ProjectionQuality projection_quality_report(
    const std::vector<std::pair<PixelCoord, PixelCoord>>& pairs, const EquirectGeometry& geom) {
    if (pairs.empty()) throw std::invalid_argument("projection_quality_report: empty pair set");
    double sum = 0.0;
    for (const auto& [proj, obs] : pairs) sum += pixel_distance_wrapped(proj, obs, geom.width);
    const double avg = sum / pairs.size();
    const double diag = std::sqrt(double(geom.width) * geom.width + double(geom.height) * geom.height);
    return {avg, avg / diag * 100.0};
}

}  // namespace panodepth
