#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "remest/delay.hpp"
#include "remest/grid.hpp"
#include "remest/parallel.hpp"
#include "remest/quadrature.hpp"

namespace remest {

struct CostParams {
    double c_s = 0.0;    // per-sample cost, > 0
    double c_tau = 0.0;  // per-transmission cost, > 0
    double lambda = 0.0; // time-average price, >= 0

    void validate() const {
        if (!(c_s > 0.0) || !std::isfinite(c_s))
            throw std::invalid_argument("c_s: must be finite and > 0");
        if (!(c_tau > 0.0) || !std::isfinite(c_tau))
            throw std::invalid_argument("c_tau: must be finite and > 0");
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("lambda: must be finite and >= 0");
    }
};

// Priced cost of waiting z from state x before the next sample:
//   h(z, x) = (z + x - lambda + mu_Y)^2/2 - (x - lambda + mu_Y)^2/2 + c_s
// evaluated in the expanded form z^2/2 + z*(x - lambda + mu_Y) + c_s,
// which is exact at z = 0.
inline double stage_cost_h(double z, double x, const CostParams& p, double mu_y) {
    if (!(z >= 0.0)) throw std::invalid_argument("stage_cost_h: z must be >= 0");
    if (!(x >= 0.0)) throw std::invalid_argument("stage_cost_h: x must be >= 0");
    const double drift = x - (p.lambda - mu_y);
    return 0.5 * z * z + z * drift + p.c_s;
}

// Constant epoch cost: c_tau - (lambda - mu_Y)*mu_Y + E[Y^2]/2.
inline double h_zero(const CostParams& p, const DelayMoments& m) {
    return p.c_tau - (p.lambda - m.mean) * m.mean + 0.5 * m.second_moment;
}

// Tabulated continuation value g on an error grid. g is the value of
// having the option to keep sampling: never positive, 0 on the stop set.
struct ValueFunction {
    ErrorGrid grid;
    std::vector<double> values;

    static ValueFunction zero(ErrorGrid g) {
        ValueFunction vf;
        vf.values.assign(g.size(), 0.0);
        vf.grid = std::move(g);
        return vf;
    }

    double operator()(double e) const {
        return interpolate_on_grid(grid, values, e);
    }
};

struct SolveReport {
    double lambda = 0.0;
    int iterations = 0;
    std::vector<double> sup_diffs;
    double j_value = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

struct ZSearch {
    double z_max = 0.0;       // 0 = derive from lambda - mu_Y
    int n_coarse = 48;        // coarse scan points (plus z = 0)
    double refine_tol = 1e-6; // golden-section bracket width
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iter = 500;
    int n_quad = 33;
    ZSearch z_search;
    std::size_t n_points = 2001;
    double e_max = 0.0;  // 0 = derive from lambda - mu_Y
    int threads = 1;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("solver.tol: must be > 0");
        if (max_iter < 1) throw std::invalid_argument("solver.max_iter: must be >= 1");
        if (n_quad < 3) throw std::invalid_argument("solver.n_quad: must be >= 3");
        if (n_points < 3) throw std::invalid_argument("grid.n_points: must be >= 3");
        if (z_search.n_coarse < 4)
            throw std::invalid_argument("solver.z_coarse: must be >= 4");
        if (!(z_search.refine_tol > 0.0))
            throw std::invalid_argument("solver.z_refine_tol: must be > 0");
    }
};

inline double resolve_z_max(const SolverOptions& opts, double delta) {
    return opts.z_search.z_max > 0.0 ? opts.z_search.z_max : default_z_max(delta);
}

inline ErrorGrid make_solver_grid(const CostParams& p, double mu_y,
                                  const SolverOptions& opts) {
    const double delta = p.lambda - mu_y;
    const double e_max =
        opts.e_max > 0.0 ? opts.e_max : default_e_max(delta, resolve_z_max(opts, delta));
    return ErrorGrid::uniform(e_max, opts.n_points);
}

namespace detail {

// Integrates E[g((s + c G)^2)], G standard normal, against the tabulated
// continuation value. g vanishes identically above its stop boundary, so
// the integral restricts exactly to the G-interval that keeps the next
// error below the boundary; on that interval Gauss-Legendre nodes weight
// the Gaussian density directly. (A plain Hermite rule over the whole
// line sees the kink at the boundary and distorts the minimizer.)
struct TransitionIntegrator {
    const ValueFunction* vf = nullptr;
    const QuadratureRule* gl = nullptr;  // Gauss-Legendre on [-1, 1]
    double sqrt_boundary = 0.0;
    static constexpr double kClip = 8.5;  // density support, ~1e-16 tails
    static constexpr double kInvSqrt2Pi = 0.3989422804014327;

    TransitionIntegrator(const ValueFunction& v, const QuadratureRule& rule)
        : vf(&v), gl(&rule), sqrt_boundary(std::sqrt(stop_boundary(v))) {}

    // first grid point after which the tabulated g is identically zero
    static double stop_boundary(const ValueFunction& v) {
        const std::size_t n = v.values.size();
        std::size_t last_negative = n;
        for (std::size_t i = 0; i < n; ++i)
            if (v.values[i] < 0.0) last_negative = i;
        if (last_negative == n) return 0.0;
        if (last_negative + 1 < n) return v.grid.points[last_negative + 1];
        return v.grid.e_max();
    }

    double expect(double s, double c) const {
        const double a = std::max((-sqrt_boundary - s) / c, -kClip);
        const double b = std::min((sqrt_boundary - s) / c, kClip);
        if (!(b > a)) return 0.0;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int k = 0; k < gl->size(); ++k) {
            const double u = mid + half * gl->points[k];
            const double r = s + c * u;
            acc += gl->weights[k] * std::exp(-0.5 * u * u) * (*vf)(r * r);
        }
        return acc * half * kInvSqrt2Pi;
    }
};

}  // namespace detail

// Expected continuation value after waiting z from error e: the next
// error is (sqrt(e) + sqrt(z) G)^2 with G standard normal.
inline double transition_expectation(const ValueFunction& vf, double e, double z,
                                     const QuadratureRule& quad) {
    if (!(z >= 0.0)) throw std::invalid_argument("transition_expectation: z must be >= 0");
    if (z == 0.0) return vf(e);  // deterministic transition
    return detail::TransitionIntegrator(vf, quad).expect(std::sqrt(e), std::sqrt(z));
}

inline double transition_expectation(const ValueFunction& vf, double e, double z,
                                     int n_quad) {
    if (n_quad < 3) throw std::invalid_argument("transition_expectation: n_quad must be >= 3");
    return transition_expectation(vf, e, z, gauss_legendre_unit(n_quad));
}

namespace detail {

// Candidate waiting times for the coarse scan: 0, a geometric ramp
// through the small-z regime, then linear coverage up to z_max.
inline std::vector<double> make_wait_candidates(double z_max, int n_coarse) {
    std::vector<double> zs;
    zs.reserve(static_cast<std::size_t>(n_coarse) + 16);
    zs.push_back(0.0);
    const double geo_top = std::min(1.0, z_max);
    for (double z = 1e-4; z < geo_top; z *= 2.0) zs.push_back(z);
    for (int i = 1; i <= n_coarse; ++i)
        zs.push_back(z_max * static_cast<double>(i) / n_coarse);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    return zs;
}

struct WaitMinimum {
    double value = std::numeric_limits<double>::infinity();
    double z = 0.0;
};

// Coarse scan followed by golden-section refinement around the best
// candidate. Ties within 1e-9 resolve to the smallest z.
template <class F>
WaitMinimum minimize_wait(F&& f, std::span<const double> candidates, double z_max,
                          double refine_tol) {
    constexpr double kTie = 1e-9;
    const std::size_t n = candidates.size();
    std::vector<double> fs(n);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        fs[i] = f(candidates[i]);
        if (fs[i] < fs[best]) best = i;
    }
    // smallest z within the tie tolerance of the coarse minimum
    std::size_t pick = best;
    for (std::size_t i = 0; i < best; ++i) {
        if (fs[i] <= fs[best] + kTie) {
            pick = i;
            break;
        }
    }
    double lo = pick > 0 ? candidates[pick - 1] : 0.0;
    double hi = pick + 1 < n ? candidates[pick + 1] : z_max;
    WaitMinimum result{fs[pick], candidates[pick]};

    if (hi > lo + refine_tol) {
        constexpr double kGolden = 0.6180339887498949;
        double a = lo, b = hi;
        double c = b - kGolden * (b - a);
        double d = a + kGolden * (b - a);
        double fc = f(c), fd = f(d);
        while (b - a > refine_tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kGolden * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kGolden * (b - a);
                fd = f(d);
            }
        }
        const double zr = fc < fd ? c : d;
        const double fr = std::min(fc, fd);
        if (fr < result.value - kTie || (fr <= result.value + kTie && zr < result.z)) {
            result = {fr, zr};
        }
    }
    if (result.z < refine_tol && fs[0] <= result.value + kTie)
        result = {fs[0], 0.0};
    return result;
}

}  // namespace detail

// One Bellman update with per-point minimizers kept for policy extraction.
struct BackupResult {
    ValueFunction vf;                 // min{0, inner_value} per grid point
    std::vector<double> inner_value;  // min_z [ h(z,E) + E g_prev ]
    std::vector<double> z_inner;      // argmin of the inner problem
};

inline BackupResult bellman_backup_detailed(const ValueFunction& prev,
                                            const CostParams& p, double mu_y,
                                            const SolverOptions& opts,
                                            const QuadratureRule& quad) {
    const double delta = p.lambda - mu_y;
    const double z_max = resolve_z_max(opts, delta);
    const std::vector<double> candidates =
        detail::make_wait_candidates(z_max, opts.z_search.n_coarse);
    const detail::TransitionIntegrator trans(prev, quad);

    const std::size_t n = prev.grid.size();
    BackupResult out;
    out.vf.grid = prev.grid;
    out.vf.values.assign(n, 0.0);
    out.inner_value.assign(n, 0.0);
    out.z_inner.assign(n, 0.0);

    parallel_for(n, opts.threads, [&](std::size_t i) {
        const double e = prev.grid.points[i];
        const double drift = e - delta;
        const double s = std::sqrt(e);
        const auto objective = [&](double z) {
            const double future = z == 0.0 ? prev.values[i]  // identity transition
                                           : trans.expect(s, std::sqrt(z));
            return 0.5 * z * z + z * drift + p.c_s + future;
        };
        const auto m = detail::minimize_wait(objective, candidates, z_max,
                                             opts.z_search.refine_tol);
        out.inner_value[i] = m.value;
        out.z_inner[i] = m.z;
        out.vf.values[i] = std::min(0.0, m.value);
    });
    return out;
}

inline ValueFunction bellman_backup(const ValueFunction& prev, const CostParams& p,
                                    double mu_y, const SolverOptions& opts) {
    return bellman_backup_detailed(prev, p, mu_y, opts, gauss_legendre_unit(opts.n_quad))
        .vf;
}

// Value iteration from g = 0 until the sup-norm change falls below tol.
// Non-convergence within max_iter is reported, not fatal.
inline std::pair<ValueFunction, SolveReport> solve_g_infinity(const CostParams& p,
                                                              double mu_y,
                                                              const ErrorGrid& grid,
                                                              const SolverOptions& opts) {
    p.validate();
    opts.validate();
    const QuadratureRule quad = gauss_legendre_unit(opts.n_quad);

    ValueFunction vf = ValueFunction::zero(grid);
    SolveReport report;
    report.lambda = p.lambda;
    for (int it = 0; it < opts.max_iter; ++it) {
        BackupResult next = bellman_backup_detailed(vf, p, mu_y, opts, quad);
        double sup = 0.0;
        for (std::size_t i = 0; i < vf.values.size(); ++i)
            sup = std::max(sup, std::abs(next.vf.values[i] - vf.values[i]));
        vf = std::move(next.vf);
        report.sup_diffs.push_back(sup);
        if (sup <= opts.tol) {
            report.converged = true;
            break;
        }
    }
    report.iterations = static_cast<int>(report.sup_diffs.size());
    return {std::move(vf), std::move(report)};
}

}  // namespace remest
