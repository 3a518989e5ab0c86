#include "panodepth/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace panodepth {

namespace {

[[noreturn]] void bad_pair(const std::string& label, const std::string& what) {
    throw std::invalid_argument("metrics: " + (label.empty() ? what : label + " " + what));
}

}  // namespace

void MetricsAccumulator::add_image(const DepthMap& pred, const DepthMap& gt,
                                   const std::string& label) {
    if (!pred.same_shape(gt)) bad_pair(label, "prediction/gt dimensions differ");

    double abs_sum = 0.0, sq_sum = 0.0, rel_sum = 0.0;
    long long n = 0;
    for (int y = 0; y < gt.height; ++y)
        for (int x = 0; x < gt.width; ++x) {
            if (!gt.is_valid(x, y)) continue;
            if (!pred.is_valid(x, y)) {
                ++missing_;
                continue;
            }
            const double d = gt.at(x, y) - pred.at(x, y);
            abs_sum += std::fabs(d);
            sq_sum += d * d;
            rel_sum += std::fabs(d / gt.at(x, y));
            ++n;
        }
    if (n == 0) bad_pair(label, "has no shared valid pixel");

    mae_sum_ += abs_sum / double(n);
    rmse_sum_ += std::sqrt(sq_sum / double(n));
    mare_sum_ += rel_sum / double(n);
    pooled_abs_ += abs_sum;
    pooled_sq_ += sq_sum;
    pooled_rel_ += rel_sum;
    pixels_ += n;
    ++images_;
}

MaskedErrors MetricsAccumulator::result(MetricAggregation agg) const {
    if (images_ == 0) throw std::invalid_argument("metrics: empty image set");
    MaskedErrors out;
    out.image_count = images_;
    out.evaluated_pixel_count = pixels_;
    out.missing_pred_pixel_count = missing_;
    if (agg == MetricAggregation::per_image) {
        out.mae = mae_sum_ / double(images_);
        out.rmse = rmse_sum_ / double(images_);
        out.mare = mare_sum_ / double(images_);
    } else {
        out.mae = pooled_abs_ / double(pixels_);
        out.rmse = std::sqrt(pooled_sq_ / double(pixels_));
        out.mare = pooled_rel_ / double(pixels_);
    }
    return out;
}

MaskedErrors masked_errors(std::span<const DepthMap> pred, std::span<const DepthMap> gt,
                           MetricAggregation agg) {
    if (pred.size() != gt.size())
        throw std::invalid_argument("metrics: prediction/gt image counts differ");
    MetricsAccumulator acc;
    for (size_t i = 0; i < pred.size(); ++i)
        acc.add_image(pred[i], gt[i], "image " + std::to_string(i));
    return acc.result(agg);
}

double masked_mae(const DepthMap& pred, const DepthMap& gt) {
    return masked_errors({&pred, 1}, {&gt, 1}).mae;
}

double masked_rmse(const DepthMap& pred, const DepthMap& gt) {
    return masked_errors({&pred, 1}, {&gt, 1}).rmse;
}

double masked_mare(const DepthMap& pred, const DepthMap& gt) {
    return masked_errors({&pred, 1}, {&gt, 1}).mare;
}

void LrceAccumulator::add_image(const DepthMap& pred, const DepthMap& gt,
                                const std::string& label) {
    if (!pred.same_shape(gt)) bad_pair(label, "prediction/gt dimensions differ");
    const int right = gt.width - 1;
    double sum = 0.0;
    long long pairs = 0;
    for (int y = 0; y < gt.height; ++y) {
        if (!gt.is_valid(0, y) || !gt.is_valid(right, y)) continue;
        if (!pred.is_valid(0, y) || !pred.is_valid(right, y)) {
            ++skipped_;
            continue;
        }
        const double e_gt = std::fabs(gt.at(0, y) - gt.at(right, y));
        const double e_pred = std::fabs(pred.at(0, y) - pred.at(right, y));
        sum += std::fabs(e_gt - e_pred);
        ++pairs;
    }
    if (pairs > 0) {
        image_sum_ += sum / double(pairs);
        pairs_ += pairs;
        ++images_;
    }
}

LrceResult LrceAccumulator::result() const {
    if (images_ == 0)
        throw std::invalid_argument("lrce: no image has a valid left/right edge pair");
    LrceResult out;
    out.lrce = image_sum_ / double(images_);
    out.image_count = images_;
    out.pair_count = pairs_;
    out.skipped_pred_pairs = skipped_;
    return out;
}

LrceResult lrce(std::span<const DepthMap> pred, std::span<const DepthMap> gt) {
    if (pred.size() != gt.size())
        throw std::invalid_argument("lrce: prediction/gt image counts differ");
    LrceAccumulator acc;
    for (size_t i = 0; i < pred.size(); ++i)
        acc.add_image(pred[i], gt[i], "image " + std::to_string(i));
    return acc.result();
}

double inlier_ratio(std::span<const double> estimates, std::span<const double> truths,
                    double t_inlier, bool absolute) {
    if (estimates.size() != truths.size())
        throw std::invalid_argument("inlier_ratio: estimate/truth counts differ");
    if (estimates.empty()) throw std::invalid_argument("inlier_ratio: empty input");
    long long in = 0;
    for (size_t i = 0; i < estimates.size(); ++i) {
        const double err = std::fabs(estimates[i] - truths[i]);
        const double e = absolute ? err : err / std::fabs(truths[i]);
        if (e < t_inlier) ++in;
    }
    return double(in) / double(estimates.size());
}

}  // namespace panodepth
