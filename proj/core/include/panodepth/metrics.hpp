#pragma once

// Benchmark metrics over masked rasters: MAE / RMSE / MARE with per-image
// aggregation, the 360° seam consistency error (LRCE), and the inlier ratio.

#include <span>
#include <string>
#include <vector>

#include "panodepth/raster.hpp"

namespace panodepth {

/// Per-image-then-mean is the reference semantics; pooled averages every
/// valid pixel across the dataset and exists for cross-checking.
enum class MetricAggregation : uint8_t { per_image, pooled };

struct MaskedErrors {
    double mae = 0.0;
    double rmse = 0.0;
    double mare = 0.0;
    long long image_count = 0;
    long long evaluated_pixel_count = 0;
    long long missing_pred_pixel_count = 0;  // gt-labeled pixels the prediction lacks
};

/// Streaming form of masked_errors: feed image pairs one at a time, read the
/// dataset aggregate at the end. Keeps memory flat over arbitrarily long
/// sequences.
class MetricsAccumulator {
public:
    /// Throws (naming `label` when given) if the pair shares no valid pixel
    /// or the shapes differ.
    void add_image(const DepthMap& pred, const DepthMap& gt, const std::string& label = {});
    MaskedErrors result(MetricAggregation agg = MetricAggregation::per_image) const;
    long long image_count() const { return images_; }

private:
    double mae_sum_ = 0.0, rmse_sum_ = 0.0, mare_sum_ = 0.0;
    double pooled_abs_ = 0.0, pooled_sq_ = 0.0, pooled_rel_ = 0.0;
    long long images_ = 0, pixels_ = 0, missing_ = 0;
};

/// Errors over pixels valid in both gt and prediction. Throws, naming the
/// image, when some image shares no valid pixel.
MaskedErrors masked_errors(std::span<const DepthMap> pred, std::span<const DepthMap> gt,
                           MetricAggregation agg = MetricAggregation::per_image);

double masked_mae(const DepthMap& pred, const DepthMap& gt);
double masked_rmse(const DepthMap& pred, const DepthMap& gt);
double masked_mare(const DepthMap& pred, const DepthMap& gt);

struct LrceResult {
    double lrce = 0.0;
    long long image_count = 0;       // images contributing at least one pair
    long long pair_count = 0;
    long long skipped_pred_pairs = 0;  // gt pair present, prediction unlabeled
};

/// Streaming form of lrce; images without a usable edge pair are tolerated
/// per image and only rejected if the whole set has none.
class LrceAccumulator {
public:
    void add_image(const DepthMap& pred, const DepthMap& gt, const std::string& label = {});
    LrceResult result() const;  // throws when no image had a valid pair

private:
    double image_sum_ = 0.0;
    long long images_ = 0, pairs_ = 0, skipped_ = 0;
};

/// Mean absolute difference between the ground-truth and predicted
/// left/right-edge discrepancies. Ground truth is expected to be a completed
/// map, which is what makes edge pairs plentiful.
LrceResult lrce(std::span<const DepthMap> pred, std::span<const DepthMap> gt);

/// Fraction of estimates within t_inlier of the truth; relative by default.
double inlier_ratio(std::span<const double> estimates, std::span<const double> truths,
                    double t_inlier, bool absolute = false);

}  // namespace panodepth
