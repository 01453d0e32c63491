#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mtmc/meanshift.hpp"

using namespace mtmc;

namespace {

/// Independent fixed-point solve of the kernel-weighted mean update on an
/// isolated point set (no neighborhood cutoff needed when the set is tight).
Point2 fixed_point_mean(const std::vector<Point2>& pts, double bandwidth, Point2 c) {
    for (int it = 0; it < 2000; ++it) {
        double wsum = 0.0, xs = 0.0, ys = 0.0;
        for (const Point2& p : pts) {
            const double w = std::exp(-distance(p, c) / (2.0 * bandwidth * bandwidth));
            wsum += w;
            xs += w * p.x;
            ys += w * p.y;
        }
        const Point2 next{xs / wsum, ys / wsum};
        const double moved = distance(next, c);
        c = next;
        if (moved < 1e-9) break;
    }
    return c;
}

}  // namespace

TEST(MeanShift, EmptyInput) {
    const auto res = mean_shift({}, 10.0);
    EXPECT_TRUE(res.centroids.empty());
    EXPECT_TRUE(res.assignment.empty());
}

TEST(MeanShift, SinglePointIsFixedPoint) {
    const auto res = mean_shift({{42.0, 17.0}}, 10.0);
    ASSERT_EQ(res.centroids.size(), 1u);
    EXPECT_DOUBLE_EQ(res.centroids[0].x, 42.0);
    EXPECT_DOUBLE_EQ(res.centroids[0].y, 17.0);
    EXPECT_EQ(res.assignment[0], 0);
    EXPECT_LE(res.max_iterations_used, 1);
}

TEST(MeanShift, IdenticalPointsConvergeImmediately) {
    const std::vector<Point2> pts(8, Point2{5.0, -3.0});
    const auto res = mean_shift(pts, 25.0);
    ASSERT_EQ(res.centroids.size(), 1u);
    EXPECT_DOUBLE_EQ(res.centroids[0].x, 5.0);
    EXPECT_DOUBLE_EQ(res.centroids[0].y, -3.0);
    EXPECT_LE(res.max_iterations_used, 1);
    for (int a : res.assignment) EXPECT_EQ(a, 0);
}

TEST(MeanShift, TwoFarClustersMatchPerClusterFixedPoint) {
    const double sigma = 10.0;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> off(-3.0, 3.0);
    std::vector<Point2> a, b, all;
    for (int i = 0; i < 10; ++i) a.push_back({100.0 + off(rng), 50.0 + off(rng)});
    for (int i = 0; i < 10; ++i) b.push_back({100.0 + 10.0 * sigma + off(rng), 50.0 + off(rng)});
    all = a;
    all.insert(all.end(), b.begin(), b.end());

    const auto res = mean_shift(all, sigma);
    ASSERT_EQ(res.centroids.size(), 2u);
    const Point2 fa = fixed_point_mean(a, sigma, a[0]);
    const Point2 fb = fixed_point_mean(b, sigma, b[0]);
    // centroid order follows first point occurrence
    EXPECT_NEAR(res.centroids[0].x, fa.x, 1e-3);
    EXPECT_NEAR(res.centroids[0].y, fa.y, 1e-3);
    EXPECT_NEAR(res.centroids[1].x, fb.x, 1e-3);
    EXPECT_NEAR(res.centroids[1].y, fb.y, 1e-3);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(res.assignment[i], 0);
    for (int i = 10; i < 20; ++i) EXPECT_EQ(res.assignment[i], 1);
}

TEST(MeanShift, NearbyModesMerge) {
    // two blobs half a bandwidth apart collapse into a single mode
    std::vector<Point2> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.0 + i * 0.1, 0.0});
    for (int i = 0; i < 5; ++i) pts.push_back({2.0 + i * 0.1, 0.0});
    const auto res = mean_shift(pts, 50.0);
    EXPECT_EQ(res.centroids.size(), 1u);
}

TEST(MeanShift, NonFiniteCoordinateRejected) {
    EXPECT_THROW(mean_shift({{std::nan(""), 0.0}}, 10.0), ValidationError);
    EXPECT_THROW(mean_shift({{0.0, std::numeric_limits<double>::infinity()}}, 10.0),
                 ValidationError);
}

TEST(MeanShift, BandwidthMustBePositive) {
    EXPECT_THROW(mean_shift({{0.0, 0.0}}, 0.0), ValidationError);
}
