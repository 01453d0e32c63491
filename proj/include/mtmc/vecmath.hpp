#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mtmc/errors.hpp"

namespace mtmc {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw ValidationError("vector dimension mismatch: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm(const Vec& a) { return std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0)); }

inline Vec normalized(Vec a) {
    const double n = norm(a);
    if (n > 0.0)
        for (double& v : a) v /= n;
    return a;
}

/// Cosine similarity; zero vectors compare as 0.
inline double cosine_similarity(const Vec& a, const Vec& b) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

inline double euclidean_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw ValidationError("vector dimension mismatch: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline void add_in_place(Vec& acc, const Vec& v, double scale = 1.0) {
    if (acc.empty()) acc.assign(v.size(), 0.0);
    if (acc.size() != v.size())
        throw ValidationError("vector dimension mismatch in accumulation");
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += scale * v[i];
}

}  // namespace mtmc
