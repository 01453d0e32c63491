#pragma once

#include <algorithm>
#include <cmath>

namespace mtmc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned box, top-left corner plus size, in pixels.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    Point2 center() const { return {x + w / 2.0, y + h / 2.0}; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
};

inline double intersection_area(const Box& a, const Box& b) {
    const double ix = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    return ix * iy;
}

/// Intersection-over-union of two boxes with positive extent.
inline double iou(const Box& a, const Box& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

}  // namespace mtmc
