#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "panodepth/metrics.hpp"
#include "panodepth/random.hpp"

using namespace panodepth;

namespace {

DepthMap map_from(std::initializer_list<double> values, int width, int height) {
    DepthMap m(width, height);
    int i = 0;
    for (double v : values) {
        if (!std::isnan(v)) m.set(i % width, i / width, v);
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("masked errors on the two-pixel case") {
    const DepthMap gt = map_from({2.0, 4.0}, 2, 1);
    const DepthMap pred = map_from({2.5, 3.5}, 2, 1);

    CHECK(masked_mae(pred, gt) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(masked_rmse(pred, gt) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(masked_mare(pred, gt) == doctest::Approx(0.1875).epsilon(1e-14));

    CHECK(masked_mae(gt, gt) == doctest::Approx(0.0));
    CHECK(masked_rmse(gt, gt) == doctest::Approx(0.0));
    CHECK(masked_mare(gt, gt) == doctest::Approx(0.0));
}

TEST_CASE("per-image aggregation weights images equally") {
    // image A: one pixel, error 1; image B: four pixels, error 3 each
    const DepthMap gt_a = map_from({10.0}, 1, 1);
    const DepthMap pred_a = map_from({11.0}, 1, 1);
    const DepthMap gt_b = map_from({10.0, 10.0, 10.0, 10.0}, 4, 1);
    const DepthMap pred_b = map_from({13.0, 13.0, 13.0, 13.0}, 4, 1);

    const std::vector<DepthMap> pred{pred_a, pred_b}, gt{gt_a, gt_b};
    const auto per_image = masked_errors(pred, gt, MetricAggregation::per_image);
    CHECK(per_image.mae == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(per_image.image_count == 2);
    CHECK(per_image.evaluated_pixel_count == 5);

    const auto pooled = masked_errors(pred, gt, MetricAggregation::pooled);
    CHECK(pooled.mae == doctest::Approx((1.0 + 4 * 3.0) / 5.0).epsilon(1e-14));
}

TEST_CASE("metrics ignore pixels without ground truth") {
    DepthMap gt(3, 1);
    gt.set(0, 0, 5.0);
    DepthMap pred(3, 1);
    pred.set(0, 0, 5.0);
    pred.set(1, 0, 99.0);  // no gt here, must not count
    pred.set(2, 0, 99.0);

    const auto e = masked_errors({&pred, 1}, {&gt, 1});
    CHECK(e.mae == doctest::Approx(0.0));
    CHECK(e.evaluated_pixel_count == 1);
}

TEST_CASE("gt-labeled pixels missing from the prediction are diagnosed") {
    DepthMap gt(2, 1);
    gt.set(0, 0, 5.0);
    gt.set(1, 0, 6.0);
    DepthMap pred(2, 1);
    pred.set(0, 0, 5.5);

    const auto e = masked_errors({&pred, 1}, {&gt, 1});
    CHECK(e.evaluated_pixel_count == 1);
    CHECK(e.missing_pred_pixel_count == 1);
    CHECK(e.mae == doctest::Approx(0.5));
}

TEST_CASE("an image without shared valid pixels is an error naming it") {
    const DepthMap gt_ok = map_from({1.0}, 1, 1);
    const DepthMap pred_ok = map_from({1.0}, 1, 1);
    DepthMap gt_empty(1, 1);
    DepthMap pred_any = map_from({1.0}, 1, 1);

    const std::vector<DepthMap> pred{pred_ok, pred_any}, gt{gt_ok, gt_empty};
    try {
        masked_errors(pred, gt);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("image 1") != std::string::npos);
    }
}

TEST_CASE("metrics are permutation invariant") {
    std::mt19937_64 rng(61);
    std::vector<DepthMap> gt, pred;
    for (int i = 0; i < 5; ++i) {
        DepthMap g(8, 4), p(8, 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 8; ++x)
                if (uniform_double(rng) < 0.7) {
                    g.set(x, y, 1.0 + uniform_double(rng) * 9.0);
                    p.set(x, y, g.at(x, y) + gaussian(rng) * 0.2);
                }
        gt.push_back(g);
        pred.push_back(p);
    }
    const auto base = masked_errors(pred, gt);

    std::vector<size_t> order{4, 2, 0, 3, 1};
    std::vector<DepthMap> gt2, pred2;
    for (size_t i : order) {
        gt2.push_back(gt[i]);
        pred2.push_back(pred[i]);
    }
    const auto shuffled = masked_errors(pred2, gt2);
    CHECK(shuffled.mae == doctest::Approx(base.mae).epsilon(1e-14));
    CHECK(shuffled.rmse == doctest::Approx(base.rmse).epsilon(1e-14));
    CHECK(shuffled.mare == doctest::Approx(base.mare).epsilon(1e-14));
}

TEST_CASE("streaming accumulators match the batch functions") {
    std::mt19937_64 rng(73);
    std::vector<DepthMap> gt, pred;
    for (int i = 0; i < 7; ++i) {
        DepthMap g(12, 6), p(12, 6);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 12; ++x) {
                if (uniform_double(rng) < 0.6) {
                    g.set(x, y, 1.0 + uniform_double(rng) * 9.0);
                    if (uniform_double(rng) < 0.9)
                        p.set(x, y, g.at(x, y) + gaussian(rng) * 0.3);
                } else if (uniform_double(rng) < 0.3) {
                    p.set(x, y, uniform_double(rng) * 5.0);
                }
            }
        gt.push_back(g);
        pred.push_back(p);
    }

    MetricsAccumulator acc;
    LrceAccumulator lacc;
    for (size_t i = 0; i < gt.size(); ++i) {
        acc.add_image(pred[i], gt[i]);
        lacc.add_image(pred[i], gt[i]);
    }
    for (auto agg : {MetricAggregation::per_image, MetricAggregation::pooled}) {
        const auto batch = masked_errors(pred, gt, agg);
        const auto streamed = acc.result(agg);
        CHECK(streamed.mae == batch.mae);
        CHECK(streamed.rmse == batch.rmse);
        CHECK(streamed.mare == batch.mare);
        CHECK(streamed.evaluated_pixel_count == batch.evaluated_pixel_count);
        CHECK(streamed.missing_pred_pixel_count == batch.missing_pred_pixel_count);
    }
    const auto lrce_batch = lrce(pred, gt);
    const auto lrce_streamed = lacc.result();
    CHECK(lrce_streamed.lrce == lrce_batch.lrce);
    CHECK(lrce_streamed.pair_count == lrce_batch.pair_count);
}

TEST_CASE("lrce compares edge discrepancies") {
    // identical pred/gt
    DepthMap gt(4, 2);
    gt.set(0, 0, 10.0);
    gt.set(3, 0, 10.0);
    const auto zero = lrce({&gt, 1}, {&gt, 1});
    CHECK(zero.lrce == doctest::Approx(0.0));
    CHECK(zero.pair_count == 1);

    // gt edges (10, 10), pred edges (10, 12) -> |0 - 2| = 2
    DepthMap pred = gt;
    pred.set(3, 0, 12.0);
    const auto two = lrce({&pred, 1}, {&gt, 1});
    CHECK(two.lrce == doctest::Approx(2.0));

    // horizontally periodic pred and gt score zero even when they differ
    DepthMap gt_p(4, 2), pred_p(4, 2);
    for (int y = 0; y < 2; ++y) {
        gt_p.set(0, y, 5.0 + y);
        gt_p.set(3, y, 5.0 + y);
        pred_p.set(0, y, 8.0 + 2 * y);
        pred_p.set(3, y, 8.0 + 2 * y);
    }
    CHECK(lrce({&pred_p, 1}, {&gt_p, 1}).lrce == doctest::Approx(0.0));
}

TEST_CASE("lrce skips pairs the prediction lacks and errors with none at all") {
    DepthMap gt(4, 2);
    gt.set(0, 0, 10.0);
    gt.set(3, 0, 11.0);
    gt.set(0, 1, 5.0);
    gt.set(3, 1, 5.0);
    DepthMap pred(4, 2);
    pred.set(0, 1, 5.0);
    pred.set(3, 1, 7.0);  // row 0 missing in pred -> skipped

    const auto res = lrce({&pred, 1}, {&gt, 1});
    CHECK(res.pair_count == 1);
    CHECK(res.skipped_pred_pairs == 1);
    CHECK(res.lrce == doctest::Approx(2.0));

    DepthMap no_pairs(4, 2);
    no_pairs.set(1, 0, 3.0);  // interior label only
    CHECK_THROWS_AS(lrce({&no_pairs, 1}, {&no_pairs, 1}), std::invalid_argument);
}

TEST_CASE("inlier_ratio with relative and absolute thresholds") {
    const std::vector<double> truths{10.0, 10.0};
    const std::vector<double> estimates{10.05, 11.0};
    CHECK(inlier_ratio(estimates, truths, 0.01) == doctest::Approx(0.5));

    const std::vector<double> exact{3.0, 4.0};
    CHECK(inlier_ratio(exact, exact, 0.01) == doctest::Approx(1.0));

    // strict comparison: nothing is an inlier at t = 0
    CHECK(inlier_ratio(estimates, truths, 0.0) == doctest::Approx(0.0));

    // absolute reading: |10.05 - 10| = 0.05 m < 0.1 m, |11 - 10| = 1 m is out
    CHECK(inlier_ratio(estimates, truths, 0.1, true) == doctest::Approx(0.5));

    CHECK_THROWS_AS(inlier_ratio({}, {}, 0.01), std::invalid_argument);
}
