#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/geometry.hpp"

namespace mtmc {

struct MeanShiftResult {
    std::vector<Point2> centroids;
    std::vector<int> assignment;  // point index -> centroid index
    int max_iterations_used = 0;  // worst case over all seeds
};

/// One mean-shift update: kernel-weighted mean of the points within radius
/// `bandwidth` of `c`. The kernel is exp(-||d|| / (2 sigma^2)) with the
/// distance, not its square, in the exponent.
inline Point2 mean_shift_step(const Point2& c, const std::vector<Point2>& points,
                              double bandwidth) {
    double wsum = 0.0, xs = 0.0, ys = 0.0;
    for (const Point2& p : points) {
        const double d = distance(p, c);
        if (d > bandwidth) continue;
        const double w = std::exp(-d / (2.0 * bandwidth * bandwidth));
        wsum += w;
        xs += w * p.x;
        ys += w * p.y;
    }
    if (wsum == 0.0) return c;  // isolated candidate; cannot move
    return {xs / wsum, ys / wsum};
}

/// Mode seeking over 2D points. Every point seeds a candidate centroid which
/// is iterated until it moves less than `tol` or `max_iter` is hit; converged
/// modes closer than bandwidth/2 collapse into one, and each point joins its
/// nearest surviving mode.
inline MeanShiftResult mean_shift(const std::vector<Point2>& points, double bandwidth,
                                  double tol = 1e-3, int max_iter = 500) {
    if (bandwidth <= 0.0) throw ValidationError("mean_shift: bandwidth must be > 0");
    for (const Point2& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("mean_shift: non-finite coordinate");

    MeanShiftResult res;
    if (points.empty()) return res;

    std::vector<Point2> converged(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        Point2 c = points[i];
        int it = 0;
        while (it < max_iter) {
            const Point2 next = mean_shift_step(c, points, bandwidth);
            ++it;
            const double moved = distance(next, c);
            c = next;
            if (moved < tol) break;
        }
        if (it > res.max_iterations_used) res.max_iterations_used = it;
        converged[i] = c;
    }

    // collapse modes closer than half a bandwidth; first occurrence wins
    for (const Point2& c : converged) {
        bool found = false;
        for (const Point2& m : res.centroids) {
            if (distance(c, m) < bandwidth / 2.0) {
                found = true;
                break;
            }
        }
        if (!found) res.centroids.push_back(c);
    }

    res.assignment.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d = distance(converged[i], res.centroids[0]);
        for (std::size_t m = 1; m < res.centroids.size(); ++m) {
            const double d = distance(converged[i], res.centroids[m]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(m);
            }
        }
        res.assignment[i] = best;
    }
    return res;
}

}  // namespace mtmc
