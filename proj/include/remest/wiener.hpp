#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "remest/rng.hpp"

namespace remest {

// Increment of a standard Wiener process over an interval of length dt,
// i.e. a draw from N(0, dt).
inline double wiener_increment(double dt, RngStream& rng) {
    if (!(dt >= 0.0))
        throw std::invalid_argument("wiener_increment: dt must be >= 0");
    if (dt == 0.0) return 0.0;
    return std::sqrt(dt) * rng.normal();
}

// Expected integral of the squared deviation from a held value over an
// interval of length y, starting from squared deviation e0:
//   E[ int_0^y (w0 + W_t)^2 dt ] = y^2/2 + y*e0   with w0^2 = e0.
inline double held_error_integral_exact(double e0, double y) {
    return 0.5 * y * y + y * e0;
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

// Path-simulation estimate of the same integral, used as an independent
// check of the closed form. Each path is simulated at fixed step
// dt = y/n_steps and integrated with the trapezoidal rule.
inline McEstimate held_error_integral_mc(double e0, double y,
                                         std::size_t n_paths, RngStream& rng,
                                         std::size_t n_steps = 1000) {
    if (!(e0 >= 0.0)) throw std::invalid_argument("held_error_integral_mc: e0 must be >= 0");
    if (!(y >= 0.0)) throw std::invalid_argument("held_error_integral_mc: y must be >= 0");
    if (n_paths < 1) throw std::invalid_argument("held_error_integral_mc: n_paths must be >= 1");
    if (n_steps < 1) throw std::invalid_argument("held_error_integral_mc: n_steps must be >= 1");

    if (y == 0.0) return {0.0, 0.0, n_paths};

    const double dt = y / static_cast<double>(n_steps);
    const double sdt = std::sqrt(dt);
    const double w0 = std::sqrt(e0);

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        double w = w0;
        double acc = 0.0;
        for (std::size_t s = 0; s < n_steps; ++s) {
            const double w_next = w + sdt * rng.normal();
            acc += 0.5 * dt * (w * w + w_next * w_next);
            w = w_next;
        }
        sum += acc;
        sumsq += acc * acc;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n > 1 ? n - 1 : 1);
    return {mean, std::sqrt(var / n), n_paths};
}

}  // namespace remest
