#include "panodepth/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

namespace panodepth {

void CompletionParams::validate() const {
    if (m < 0) throw std::invalid_argument("completion params: m must be >= 0");
    if (k < 1) throw std::invalid_argument("completion params: k must be >= 1");
    if (!(rip >= 0.0 && rip <= 1.0))
        throw std::invalid_argument("completion params: rip must lie in [0, 1]");
    if (t_ood_deg < 0.0) throw std::invalid_argument("completion params: t_ood must be >= 0");
    if (n_grid < 1) throw std::invalid_argument("completion params: n_grid must be >= 1");
    if (!(t_theta_deg >= 0.0 && t_theta_deg < 90.0))
        throw std::invalid_argument("completion params: t_theta must lie in [0, 90)");
    if (t_inlier < 0.0) throw std::invalid_argument("completion params: t_inlier must be >= 0");
}

AggregatedCloud temporal_aggregate(std::span<const PointCloud> clouds, int center, int m,
                                   AggregationMode mode) {
    if (clouds.empty() || center < 0 || center >= int(clouds.size()))
        throw std::invalid_argument("temporal_aggregate: center index outside the sequence");
    if (m < 0) throw std::invalid_argument("temporal_aggregate: m must be >= 0");

    const int lo = std::max(0, center - m);
    const int hi = std::min(int(clouds.size()) - 1, center + m);

    AggregatedCloud out;
    out.window_first = lo;
    out.window_last = hi;
    out.cloud.frame_index = clouds[center].frame_index;

    size_t total = 0;
    for (int f = lo; f <= hi; ++f) total += clouds[f].points.size();
    out.cloud.points.reserve(total);

    for (int f = lo; f <= hi; ++f) {
        if (mode == AggregationMode::no_movement) {
            out.cloud.points.insert(out.cloud.points.end(), clouds[f].points.begin(),
                                    clouds[f].points.end());
        } else {
            if (!clouds[f].to_common)
                throw std::invalid_argument(
                    "temporal_aggregate: transformed mode needs a rigid transform per cloud");
            const Mat3 rot = clouds[f].to_common->rotation_matrix();
            const Vec3 t = clouds[f].to_common->translation;
            for (const auto& sp : clouds[f].points)
                out.cloud.points.push_back(cart_to_spherical(rot * spherical_to_cart(sp) + t));
        }
    }
    return out;
}

double angular_distance(double theta_a_deg, double phi_a_deg, double theta_b_deg,
                        double phi_b_deg) {
    const double dt = theta_a_deg - theta_b_deg;
    const double dp = std::remainder(phi_a_deg - phi_b_deg, 360.0);
    return std::sqrt(dt * dt + dp * dp);
}

SphericalKnnIndex::SphericalKnnIndex(std::span<const SphericalPoint> points)
    : count_(points.size()) {
    if (points.empty()) {
        cell_start_ = {0, 0};
        return;
    }
    double tmin = points[0].theta_deg, tmax = points[0].theta_deg;
    for (const auto& p : points) {
        tmin = std::fmin(tmin, p.theta_deg);
        tmax = std::fmax(tmax, p.theta_deg);
    }
    theta_lo_ = tmin;
    const double span = std::fmax(tmax - tmin, 1e-9);

    // target roughly two points per cell, near-square cells in degrees
    const double n_cells_target = std::fmax(1.0, double(points.size()) / 2.0);
    const double cell = std::sqrt(span * 360.0 / n_cells_target);
    n_theta_ = std::clamp(int(std::lround(span / cell)), 1, 4096);
    n_phi_ = std::clamp(int(std::lround(360.0 / cell)), 1, 16384);
    cell_theta_ = span / n_theta_;
    cell_phi_ = 360.0 / n_phi_;

    const size_t n_cells = size_t(n_theta_) * n_phi_;
    std::vector<int> counts(n_cells, 0);
    auto cell_of = [&](const SphericalPoint& p) {
        return size_t(theta_cell(p.theta_deg)) * n_phi_ + phi_cell(p.phi_deg);
    };
    for (const auto& p : points) ++counts[cell_of(p)];

    cell_start_.assign(n_cells + 1, 0);
    for (size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] = cell_start_[c] + counts[c];

    entries_.resize(points.size());
    std::vector<int> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (int i = 0; i < int(points.size()); ++i) {
        const auto& p = points[i];
        // keep the raw azimuth so distances match a plain scan bit for bit;
        // only the cell assignment normalizes
        entries_[cursor[cell_of(p)]++] = {p.theta_deg, p.phi_deg, p.r, i};
    }
}

int SphericalKnnIndex::theta_cell(double theta) const {
    int c = int(std::floor((theta - theta_lo_) / cell_theta_));
    return std::clamp(c, 0, n_theta_ - 1);
}

int SphericalKnnIndex::phi_cell(double phi) const {
    int c = int(std::floor((normalize_phi_deg(phi) + 180.0) / cell_phi_));
    return std::clamp(c, 0, n_phi_ - 1);
}

std::vector<SphericalKnnIndex::Neighbor> SphericalKnnIndex::query(double theta_deg,
                                                                  double phi_deg, int k) const {
    if (k < 1) throw std::invalid_argument("knn query: k must be >= 1");
    if (size_t(k) > count_)
        throw std::invalid_argument("knn query: cloud holds fewer points than k");

    struct Cand {
        double dist;
        int index;
        double r;
        // ordered by (distance, insertion index) so ties are deterministic
        bool operator<(const Cand& o) const {
            return dist != o.dist ? dist < o.dist : index < o.index;
        }
    };
    std::priority_queue<Cand> heap;  // max-heap, top = current worst

    const int ti = theta_cell(theta_deg);
    const int pj = phi_cell(phi_deg);
    // canonical azimuth offsets visit every wrapped column exactly once
    const int dphi_lo = -(n_phi_ / 2);
    const int dphi_hi = (n_phi_ - 1) / 2;
    const double min_cell = std::fmin(cell_theta_, cell_phi_);
    const int max_ring = std::max(n_theta_, std::max(-dphi_lo, dphi_hi)) + 1;

    auto scan_cell = [&](int tc, int pc) {
        const size_t c = size_t(tc) * n_phi_ + pc;
        for (int e = cell_start_[c]; e < cell_start_[c + 1]; ++e) {
            const auto& entry = entries_[e];
            const double d = angular_distance(theta_deg, phi_deg, entry.theta, entry.phi);
            const Cand cand{d, entry.index, entry.r};
            if (int(heap.size()) < k) {
                heap.push(cand);
            } else if (cand < heap.top()) {
                heap.pop();
                heap.push(cand);
            }
        }
    };

    for (int ring = 0; ring <= max_ring; ++ring) {
        if (int(heap.size()) == k && (ring - 1) * min_cell > heap.top().dist) break;
        if (ring == 0) {
            scan_cell(ti, pj);
            continue;
        }
        for (int dt = -ring; dt <= ring; ++dt) {
            const int tc = ti + dt;
            if (tc < 0 || tc >= n_theta_) continue;
            if (std::abs(dt) == ring) {
                for (int dp = std::max(-ring, dphi_lo); dp <= std::min(ring, dphi_hi); ++dp)
                    scan_cell(tc, ((pj + dp) % n_phi_ + n_phi_) % n_phi_);
            } else {
                if (-ring >= dphi_lo) scan_cell(tc, ((pj - ring) % n_phi_ + n_phi_) % n_phi_);
                if (ring <= dphi_hi && n_phi_ > 1)
                    scan_cell(tc, ((pj + ring) % n_phi_ + n_phi_) % n_phi_);
            }
        }
    }

    std::vector<Neighbor> out(heap.size());
    for (int i = int(heap.size()) - 1; i >= 0; --i) {
        const Cand& c = heap.top();
        out[i] = {c.dist, c.r, c.index};
        heap.pop();
    }
    return out;
}

Interpolation interpolate_depth(std::span<const SphericalKnnIndex::Neighbor> neighbors) {
    if (neighbors.empty()) throw std::invalid_argument("interpolate_depth: no neighbors");
    Interpolation out;
    out.weights.assign(neighbors.size(), 0.0);
    for (size_t i = 0; i < neighbors.size(); ++i) {
        if (neighbors[i].distance_deg == 0.0) {  // exact hit, inverse-distance weights are singular here
            out.weights[i] = 1.0;
            out.r_m = neighbors[i].r_m;
            return out;
        }
    }
    double sum_inv = 0.0;
    for (const auto& nb : neighbors) sum_inv += 1.0 / nb.distance_deg;
    double r = 0.0;
    for (size_t i = 0; i < neighbors.size(); ++i) {
        out.weights[i] = (1.0 / neighbors[i].distance_deg) / sum_inv;
        r += out.weights[i] * neighbors[i].r_m;
    }
    out.r_m = r;
    return out;
}

double uncertainty(double r_q, std::span<const SphericalKnnIndex::Neighbor> neighbors,
                   std::span<const double> weights) {
    if (r_q == 0.0) throw std::invalid_argument("uncertainty: r_q must be nonzero");
    if (neighbors.size() != weights.size())
        throw std::invalid_argument("uncertainty: neighbor/weight size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < neighbors.size(); ++i) {
        const double rel = (r_q - neighbors[i].r_m) / r_q;
        s += weights[i] * rel * rel;
    }
    return s;
}

double ood_distance(std::span<const SphericalKnnIndex::Neighbor> neighbors) {
    if (neighbors.empty()) throw std::invalid_argument("ood_distance: no neighbors");
    double s = 0.0;
    for (const auto& nb : neighbors) s += nb.distance_deg;
    return s / double(neighbors.size());
}

OodThreshold derive_ood_threshold(const RigConfig& rig, int m, int k) {
    if (rig.n_beams < 1 || rig.n_channels_h < 1 || rig.fov_v_deg <= 0.0 || rig.fov_h_deg <= 0.0)
        throw std::invalid_argument("derive_ood_threshold: invalid rig config");
    OodThreshold out;
    out.delta_theta_deg = rig.fov_v_deg / rig.n_beams;
    out.delta_phi_deg = rig.fov_h_deg / rig.n_channels_h;
    out.t_ood_deg = std::hypot(out.delta_theta_deg / 2.0, out.delta_phi_deg / 2.0);
    out.n_neighbors_grid = double(k) / double(2 * m + 1);
    return out;
}

double derive_theta_limit(double fov_v_deg) {
    if (!(fov_v_deg > 0.0 && fov_v_deg <= 180.0))
        throw std::invalid_argument("derive_theta_limit: fov must lie in (0, 180]");
    return (180.0 - fov_v_deg) / 2.0;
}

std::vector<QueryPoint> generate_query_grid(long long n_grid, double t_theta_deg) {
    if (n_grid < 1) throw std::invalid_argument("generate_query_grid: n_grid must be >= 1");
    if (!(t_theta_deg >= 0.0 && t_theta_deg < 90.0))
        throw std::invalid_argument("generate_query_grid: t_theta must lie in [0, 90)");
    const double theta_hi = 180.0 - t_theta_deg;
    const double band_fraction =
        (std::cos(deg_to_rad(t_theta_deg)) - std::cos(deg_to_rad(theta_hi))) / 2.0;
    static const double golden = (1.0 + std::sqrt(5.0)) / 2.0;

    std::vector<QueryPoint> out;
    out.reserve(size_t(double(n_grid) * band_fraction * 1.02) + 16);
    for (long long i = 0; i < n_grid; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / double(n_grid);
        const double theta = rad_to_deg(std::acos(z));
        if (theta < t_theta_deg || theta > theta_hi) continue;
        const double frac = std::fmod(double(i) / golden, 1.0);
        out.push_back({theta, frac * 360.0 - 180.0});
    }
    return out;
}

double uncertainty_threshold_for_rip(std::span<const double> sigma_sq, double rip) {
    if (sigma_sq.empty())
        throw std::invalid_argument("uncertainty_threshold_for_rip: empty value set");
    if (!(rip >= 0.0 && rip <= 1.0))
        throw std::invalid_argument("uncertainty_threshold_for_rip: rip must lie in [0, 1]");
    std::vector<double> sorted(sigma_sq.begin(), sigma_sq.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = rip * double(sorted.size() - 1);
    const size_t lo = size_t(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - double(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

QueryPointResult evaluate_query(const SphericalKnnIndex& index, double theta, double phi,
                                const CompletionParams& params) {
    QueryPointResult res;
    res.theta_deg = theta;
    res.phi_deg = phi;
    const auto neighbors = index.query(theta, phi, params.k);
    const auto interp = interpolate_depth(neighbors);
    res.r_m = interp.r_m;
    res.sigma_sq = uncertainty(interp.r_m, neighbors, interp.weights);
    res.mean_neighbor_dist_deg = ood_distance(neighbors);
    res.reason = res.mean_neighbor_dist_deg > params.t_ood_deg ? RejectReason::too_far
                                                               : RejectReason::kept;
    return res;
}

// Quantile threshold over the candidates that survived the OOD and band
// filters, then mark the high-variance tail. Returns the applied threshold.
double apply_uncertainty_filter(std::vector<QueryPointResult>& results, double rip,
                                std::optional<double> fixed_threshold = {}) {
    double threshold;
    if (fixed_threshold) {
        threshold = *fixed_threshold;
    } else {
        std::vector<double> sigmas;
        sigmas.reserve(results.size());
        for (const auto& r : results)
            if (r.kept()) sigmas.push_back(r.sigma_sq);
        if (sigmas.empty()) return 0.0;
        threshold = uncertainty_threshold_for_rip(sigmas, rip);
    }
    for (auto& r : results)
        if (r.kept() && r.sigma_sq > threshold) r.reason = RejectReason::high_variance;
    return threshold;
}

std::vector<QueryPointResult> evaluate_grid(const PointCloud& cloud,
                                            const CompletionParams& params) {
    if (cloud.points.empty())
        throw std::invalid_argument("depth completion: empty point cloud");
    if (cloud.points.size() < size_t(params.k))
        throw std::invalid_argument("depth completion: cloud holds fewer points than k");
    const SphericalKnnIndex index(cloud.points);
    const auto grid = generate_query_grid(params.n_grid, params.t_theta_deg);
    std::vector<QueryPointResult> results(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        results[i] = evaluate_query(index, grid[i].theta_deg, grid[i].phi_deg, params);
    return results;
}

}  // namespace

double completion_sigma_threshold(const PointCloud& aggregated, const CompletionParams& params) {
    params.validate();
    if (params.rip == 0.0)
        throw std::invalid_argument("completion_sigma_threshold: rip must be positive");
    const auto results = evaluate_grid(aggregated, params);
    std::vector<double> sigmas;
    sigmas.reserve(results.size());
    for (const auto& r : results)
        if (r.kept()) sigmas.push_back(r.sigma_sq);
    if (sigmas.empty())
        throw std::runtime_error("completion_sigma_threshold: no query point has neighbors "
                                 "within t_ood");
    return uncertainty_threshold_for_rip(sigmas, params.rip);
}

CompletionResult complete_depth_map(const PointCloud& aggregated, const DepthMap& sparse,
                                    const EquirectGeometry& geom, const CompletionParams& params,
                                    std::optional<double> sigma_threshold) {
    params.validate();
    geom.validate();
    if (aggregated.points.empty())
        throw std::invalid_argument("complete_depth_map: empty point cloud");
    if (sparse.width != geom.width || sparse.height != geom.height)
        throw std::invalid_argument("complete_depth_map: map dimensions disagree with geometry");

    CompletionResult out;
    out.dense = sparse;
    out.stats.n_grid = params.n_grid;
    out.stats.labels_original = (long long)sparse.label_count();

    if (params.rip == 0.0) {  // everything filtered, the sparse labels stand
        out.stats.labels_total = out.stats.labels_original;
        return out;
    }

    std::vector<QueryPointResult> results = evaluate_grid(aggregated, params);
    out.stats.n_in_band = (long long)results.size();

    for (const auto& r : results)
        if (r.kept()) ++out.stats.n_candidates;
    out.stats.sigma_threshold = apply_uncertainty_filter(results, params.rip, sigma_threshold);
    for (const auto& r : results)
        if (r.kept()) ++out.stats.n_kept;
    out.stats.arip =
        out.stats.n_candidates > 0 ? double(out.stats.n_kept) / double(out.stats.n_candidates) : 0.0;

    // project survivors; within a pixel the smallest interpolated depth wins
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> best(size_t(geom.width) * geom.height, kInf);
    for (const auto& r : results) {
        if (!r.kept()) continue;
        if (!theta_in_band(r.theta_deg, geom)) continue;
        const PixelCoord px =
            spherical_to_pixel_unchecked({1.0, r.theta_deg, r.phi_deg}, geom);
        int ix = int(std::floor(px.x));
        int iy = int(std::floor(px.y));
        ix = ((ix % geom.width) + geom.width) % geom.width;
        iy = std::clamp(iy, 0, geom.height - 1);
        double& slot = best[size_t(iy) * geom.width + ix];
        slot = std::fmin(slot, r.r_m);
    }
    for (int y = 0; y < geom.height; ++y)
        for (int x = 0; x < geom.width; ++x) {
            if (out.dense.is_valid(x, y)) continue;  // original labels are retained
            const double v = best[size_t(y) * geom.width + x];
            if (v < kInf) out.dense.set(x, y, v);
        }

    out.stats.labels_total = (long long)out.dense.label_count();
    out.stats.labels_added = out.stats.labels_total - out.stats.labels_original;
    return out;
}

std::pair<PointCloud, PointCloud> holdout_split(const PointCloud& cloud, double ratio,
                                                uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("holdout_split: ratio must lie in (0, 1)");
    const size_t n = cloud.points.size();
    std::vector<uint32_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = uint32_t(i);

    // hand-rolled Fisher-Yates so the partition is identical across platforms
    std::mt19937_64 rng(seed);
    for (size_t i = n; i > 1; --i) {
        const size_t j = size_t(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    const size_t n_train = size_t(std::llround(ratio * double(n)));
    std::vector<uint8_t> in_train(n, 0);
    for (size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;

    PointCloud train, test;
    train.frame_index = test.frame_index = cloud.frame_index;
    train.to_common = test.to_common = cloud.to_common;
    train.points.reserve(n_train);
    test.points.reserve(n - n_train);
    for (size_t i = 0; i < n; ++i)
        (in_train[i] ? train : test).points.push_back(cloud.points[i]);
    return {std::move(train), std::move(test)};
}

CompletionEvaluation evaluate_completion(const PointCloud& train, const PointCloud& test,
                                         const CompletionParams& params) {
    params.validate();
    if (train.points.empty() || test.points.empty())
        throw std::invalid_argument("evaluate_completion: empty train or test cloud");
    if (train.points.size() < size_t(params.k))
        throw std::invalid_argument("evaluate_completion: train cloud holds fewer points than k");

    const SphericalKnnIndex index(train.points);
    const double theta_hi = 180.0 - params.t_theta_deg;

    std::vector<QueryPointResult> results;
    std::vector<double> truths;
    results.reserve(test.points.size());
    truths.reserve(test.points.size());
    for (const auto& p : test.points) {
        if (p.theta_deg < params.t_theta_deg || p.theta_deg > theta_hi) {
            QueryPointResult r;
            r.theta_deg = p.theta_deg;
            r.phi_deg = p.phi_deg;
            r.reason = RejectReason::out_of_band;
            results.push_back(r);
        } else {
            results.push_back(evaluate_query(index, p.theta_deg, p.phi_deg, params));
        }
        truths.push_back(p.r);
    }

    long long candidates = 0;
    for (const auto& r : results)
        if (r.kept()) ++candidates;
    if (params.rip == 0.0) {
        for (auto& r : results)
            if (r.kept()) r.reason = RejectReason::high_variance;
    } else if (candidates > 0) {
        apply_uncertainty_filter(results, params.rip);
    }

    CompletionEvaluation ev;
    double abs_sum = 0.0, sq_sum = 0.0, rel_sum = 0.0;
    long long inliers = 0;
    for (size_t i = 0; i < results.size(); ++i) {
        if (!results[i].kept()) continue;
        const double err = results[i].r_m - truths[i];
        abs_sum += std::fabs(err);
        sq_sum += err * err;
        rel_sum += std::fabs(err) / truths[i];
        const double inlier_err =
            params.inlier_absolute ? std::fabs(err) : std::fabs(err) / truths[i];
        if (inlier_err < params.t_inlier) ++inliers;
        ++ev.evaluated;
    }
    if (ev.evaluated == 0)
        throw std::runtime_error("evaluate_completion: no test points survive filtering");

    ev.mae = abs_sum / double(ev.evaluated);
    ev.rmse = std::sqrt(sq_sum / double(ev.evaluated));
    ev.mare = rel_sum / double(ev.evaluated);
    ev.inlier_ratio = double(inliers) / double(ev.evaluated);
    ev.arip = candidates > 0 ? double(ev.evaluated) / double(candidates) : 0.0;
    return ev;
}

RlpReport rlp(const DepthMap& original, const DepthMap& completed) {
    if (!original.same_shape(completed))
        throw std::invalid_argument("rlp: map dimensions differ");
    int h_min = -1, h_max = -1;
    long long n_ori = 0;
    for (int y = 0; y < original.height; ++y) {
        bool any = false;
        for (int x = 0; x < original.width; ++x)
            if (original.is_valid(x, y)) {
                any = true;
                ++n_ori;
            }
        if (any) {
            if (h_min < 0) h_min = y;
            h_max = y;
        }
    }
    if (h_min < 0) throw std::invalid_argument("rlp: original map has no labels");
    if (h_max == h_min)
        throw std::invalid_argument("rlp: labelable band is empty (single labeled row)");

    long long n_aug = 0;
    for (int y = h_min; y <= h_max; ++y)
        for (int x = 0; x < completed.width; ++x)
            if (completed.is_valid(x, y)) ++n_aug;

    RlpReport rep;
    rep.h_min = h_min;
    rep.h_max = h_max;
    rep.labels_original = n_ori;
    rep.labels_completed_in_band = n_aug;
    const double denom = double(original.width) * double(h_max - h_min);
    rep.rlp_original = double(n_ori) / denom;
    rep.rlp_completed = double(n_aug) / denom;
    return rep;
}

}  // namespace panodepth
