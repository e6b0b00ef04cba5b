#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace remest {

// Discretization of the error state: strictly increasing points starting
// at exactly 0. Uniform grids keep `step` > 0 for O(1) cell lookup.
struct ErrorGrid {
    std::vector<double> points;
    double step = 0.0;  // > 0 iff uniform

    static ErrorGrid uniform(double e_max, std::size_t n_points) {
        if (n_points < 2) throw std::invalid_argument("ErrorGrid: need at least 2 points");
        if (!(e_max > 0.0)) throw std::invalid_argument("ErrorGrid: e_max must be > 0");
        ErrorGrid g;
        g.step = e_max / static_cast<double>(n_points - 1);
        g.points.resize(n_points);
        for (std::size_t i = 0; i < n_points; ++i)
            g.points[i] = static_cast<double>(i) * g.step;
        g.points.back() = e_max;
        return g;
    }

    static ErrorGrid from_points(std::vector<double> pts) {
        if (pts.size() < 2) throw std::invalid_argument("ErrorGrid: need at least 2 points");
        if (pts.front() != 0.0) throw std::invalid_argument("ErrorGrid: first point must be 0");
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (!(pts[i] > pts[i - 1]))
                throw std::invalid_argument("ErrorGrid: points must be strictly increasing");
        ErrorGrid g;
        g.points = std::move(pts);
        return g;
    }

    std::size_t size() const { return points.size(); }
    double e_max() const { return points.back(); }

    // Index i with points[i] <= e < points[i+1]; callers clamp e first.
    std::size_t cell(double e) const {
        if (step > 0.0) {
            auto i = static_cast<std::size_t>(e / step);
            return std::min(i, points.size() - 2);
        }
        auto it = std::upper_bound(points.begin(), points.end(), e);
        const auto i = static_cast<std::size_t>(it - points.begin());
        return std::min(std::max<std::size_t>(i, 1) - 1, points.size() - 2);
    }
};

// Linear interpolation of tabulated values over the grid. Values beyond
// e_max read as 0 (the stop region extends past the grid).
inline double interpolate_on_grid(const ErrorGrid& grid, std::span<const double> values,
                                  double e) {
    if (e <= 0.0) return values.front();
    const double top = grid.points.back();
    if (e >= top) return e == top ? values.back() : 0.0;
    const std::size_t i = grid.cell(e);
    const double lo = grid.points[i], hi = grid.points[i + 1];
    const double t = (e - lo) / (hi - lo);
    return values[i] + t * (values[i + 1] - values[i]);
}

// Default search range for waiting times: generous multiple of the only
// length scale (lambda - mu_Y) in the stage cost.
inline double default_z_max(double delta) {
    return 2.0 * std::max(delta, 0.0) + 1.0;
}

// Default grid extent: past delta the one-step policy already stops, and
// transitions rarely exit a few standard deviations beyond it.
inline double default_e_max(double delta, double z_max) {
    const double dp = std::max(delta, 0.0);
    return std::max({4.0 * dp, dp + 6.0 * std::sqrt(dp * z_max), 10.0});
}

}  // namespace remest
