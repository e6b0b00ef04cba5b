#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "remest/bellman.hpp"
#include "remest/delay.hpp"

namespace remest {

struct FirstStepValue {
    double value = 0.0;  // min_z [ h(z, y) + E g((sqrt(y+z) G)^2) ]
    double z1 = 0.0;
};

// Optimal first wait after a delivery whose transmission experienced
// delay y. The first error grows from zero over the whole interval
// y + z, and the first sample is mandatory: there is no stop option.
inline FirstStepValue first_step_value(double y, const ValueFunction& vf,
                                       const CostParams& p, double mu_y,
                                       const SolverOptions& opts,
                                       const QuadratureRule& quad) {
    if (!(y >= 0.0)) throw std::invalid_argument("first_step_value: y must be >= 0");
    const double delta = p.lambda - mu_y;
    const double z_max = resolve_z_max(opts, delta);
    const std::vector<double> candidates =
        detail::make_wait_candidates(z_max, opts.z_search.n_coarse);
    const detail::TransitionIntegrator trans(vf, quad);
    const double drift = y - delta;
    const auto objective = [&](double z) {
        const double future =
            y + z == 0.0 ? vf.values.front() : trans.expect(0.0, std::sqrt(y + z));
        return 0.5 * z * z + z * drift + p.c_s + future;
    };
    const auto m =
        detail::minimize_wait(objective, candidates, z_max, opts.z_search.refine_tol);
    return {m.value, m.z};
}

inline FirstStepValue first_step_value(double y, const ValueFunction& vf,
                                       const CostParams& p, double mu_y,
                                       const SolverOptions& opts) {
    return first_step_value(y, vf, p, mu_y, opts, gauss_legendre_unit(opts.n_quad));
}

// Tabulated first-wait rule Z1*(y) over a grid of realized delays.
struct FirstStepTable {
    std::vector<double> y;
    std::vector<double> z1;

    double z1_at(double delay) const {
        if (y.empty()) return 0.0;
        if (y.size() == 1 || delay <= y.front()) return z1.front();
        if (delay >= y.back()) return z1.back();
        const auto it = std::upper_bound(y.begin(), y.end(), delay);
        const std::size_t i = static_cast<std::size_t>(it - y.begin()) - 1;
        const double t = (delay - y[i]) / (y[i + 1] - y[i]);
        return z1[i] + t * (z1[i + 1] - z1[i]);
    }
};

// Waiting-time policy extracted from a converged value function:
// z_star per grid point (0 on the stop set), the stop indicator, and the
// first-step rule. stop_threshold is the start of the terminal stop run,
// used to classify off-grid errors.
struct Policy {
    ErrorGrid grid;
    std::vector<double> z_star;
    std::vector<char> stop;
    FirstStepTable first_step;
    double stop_threshold = 0.0;

    bool should_stop(double e) const { return e >= stop_threshold; }

    double wait_at(double e) const {
        if (should_stop(e)) return 0.0;
        return std::max(0.0, interpolate_on_grid(grid, z_star, e));
    }
};

// Delay grid for tabulating the first-step rule: atoms for discrete
// models, a dense range covering essentially all of the distribution
// otherwise.
inline std::vector<double> make_delay_grid(const DelayModel& model,
                                           std::size_t n_points = 1025) {
    switch (model.kind) {
        case DelayKind::deterministic:
            return {model.d};
        case DelayKind::discrete: {
            std::vector<double> ys = model.values;
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
            return ys;
        }
        default: {
            if (n_points < 2) n_points = 2;
            const double hi = model.quantile(1.0 - 1e-7);
            std::vector<double> ys(n_points);
            for (std::size_t i = 0; i < n_points; ++i)
                ys[i] = hi * static_cast<double>(i) / static_cast<double>(n_points - 1);
            return ys;
        }
    }
}

// Recomputes the per-point argmin and stop indicator from a converged
// value function and fills the first-step table over delay_grid.
inline Policy extract_policy(const ValueFunction& vf, const CostParams& p, double mu_y,
                             const SolverOptions& opts,
                             const std::vector<double>& delay_grid) {
    constexpr double kStopTol = 1e-9;
    const QuadratureRule quad = gauss_legendre_unit(opts.n_quad);
    BackupResult res = bellman_backup_detailed(vf, p, mu_y, opts, quad);

    Policy pol;
    pol.grid = vf.grid;
    const std::size_t n = vf.grid.size();
    pol.z_star.assign(n, 0.0);
    pol.stop.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool stop = res.inner_value[i] >= -kStopTol;
        pol.stop[i] = stop ? 1 : 0;
        pol.z_star[i] = stop ? 0.0 : res.z_inner[i];
    }

    // start of the terminal stop run; beyond the grid g = 0, so the stop
    // region always closes at e_max
    std::size_t last_continue = n;  // n = none
    for (std::size_t i = 0; i < n; ++i)
        if (!pol.stop[i]) last_continue = i;
    if (last_continue == n)
        pol.stop_threshold = 0.0;
    else if (last_continue + 1 < n)
        pol.stop_threshold = vf.grid.points[last_continue + 1];
    else
        pol.stop_threshold = vf.grid.e_max();

    pol.first_step.y = delay_grid;
    pol.first_step.z1.resize(delay_grid.size());
    parallel_for(delay_grid.size(), opts.threads, [&](std::size_t i) {
        pol.first_step.z1[i] =
            first_step_value(delay_grid[i], vf, p, mu_y, opts, quad).z1;
    });
    return pol;
}

}  // namespace remest
