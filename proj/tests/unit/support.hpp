#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pcnls/grid.hpp"

namespace pcnls::testing {

inline Field random_field(const GridSpec& g, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Field u(g);
    for (double& v : u.values()) v = dist(rng);
    return u;
}

/// Gaussian exp(-|z - c|^2 / (2 w^2)); c defaults to the origin.
inline Field gaussian(const GridSpec& g, double width, std::vector<double> center = {}) {
    center.resize(static_cast<std::size_t>(g.dims()), 0.0);
    return Field::sample(g, [&](std::span<const double> z) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < z.size(); ++a) r2 += (z[a] - center[a]) * (z[a] - center[a]);
        return std::exp(-r2 / (2.0 * width * width));
    });
}

/// Random combination of the lowest Dirichlet box modes on the first two axes.
inline Field smooth_random_field(const GridSpec& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double c[3][3];
    for (auto& row : c) {
        for (double& v : row) v = dist(rng);
    }
    return Field::sample(g, [&](std::span<const double> z) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double l0 = g.axis(0).half_width;
                const double l1 = g.axis(1).half_width;
                v += c[i][j] * std::sin((i + 1) * std::numbers::pi * (z[0] + l0) / (2.0 * l0)) *
                     std::sin((j + 1) * std::numbers::pi * (z[1] + l1) / (2.0 * l1));
            }
        }
        return v;
    });
}

inline double max_abs_difference(const Field& a, const Field& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline bool bitwise_equal(const Field& a, const Field& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

}  // namespace pcnls::testing
