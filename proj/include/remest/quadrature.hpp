#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace remest {

// Quadrature rule normalized against a probability density: `points` are
// abscissas in the variable's own units and `weights` sum to exactly 1,
// so E[f(X)] ~= sum_i weights[i] * f(points[i]).
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// Roots/weights of the physicists' Hermite polynomial H_n (weight e^{-x^2}),
// found by Newton iteration on the three-term recurrence.
inline void hermite_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    const double kEps = 3e-14;
    const int kMaxIt = 80;
    const double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        int it = 0;
        for (; it < kMaxIt; ++it) {
            double p1 = kPiQuarterInv, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= kEps) break;
        }
        if (it == kMaxIt)
            throw std::runtime_error("hermite_nodes: Newton iteration did not converge");
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Roots/weights of the Laguerre polynomial L_n (weight e^{-x} on [0,inf)).
inline void laguerre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    const double kEps = 1e-13;
    const int kMaxIt = 100;
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
        }
        int it = 0;
        double pp = 0.0, p2 = 0.0;
        for (; it < kMaxIt; ++it) {
            double p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1);
            }
            pp = n * (p1 - p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= kEps * std::max(1.0, std::abs(z))) break;
        }
        if (it == kMaxIt)
            throw std::runtime_error("laguerre_nodes: Newton iteration did not converge");
        x[i] = z;
        w[i] = -1.0 / (pp * n * p2);
    }
}

// Roots/weights of the Legendre polynomial P_n on [-1, 1].
inline void legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    const double kEps = 1e-15;
    const int kMaxIt = 100;
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        int it = 0;
        for (; it < kMaxIt; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= kEps) break;
        }
        if (it == kMaxIt)
            throw std::runtime_error("legendre_nodes: Newton iteration did not converge");
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

inline void normalize_weights(std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
}

}  // namespace detail

// Rule for expectations over a standard normal variable G:
// E[f(G)] ~= sum w_i f(g_i).
inline QuadratureRule gauss_hermite_normal(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite_normal: n must be >= 1");
    std::vector<double> x, w;
    detail::hermite_nodes(n, x, w);
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights = std::move(w);
    const double root2 = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) rule.points[i] = root2 * x[i];
    detail::normalize_weights(rule.weights);
    return rule;
}

// Rule for expectations over a unit-rate exponential variable:
// E[f(X)] ~= sum w_i f(x_i). Rescale points by 1/rate for other rates.
inline QuadratureRule gauss_laguerre_unit(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre_unit: n must be >= 1");
    QuadratureRule rule;
    detail::laguerre_nodes(n, rule.points, rule.weights);
    detail::normalize_weights(rule.weights);
    return rule;
}

// Plain Gauss-Legendre rule on [-1, 1]; weights sum to 2.
inline QuadratureRule gauss_legendre_unit(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
    QuadratureRule rule;
    detail::legendre_nodes(n, rule.points, rule.weights);
    return rule;
}

}  // namespace remest
