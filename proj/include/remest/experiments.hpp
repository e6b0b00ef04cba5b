#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "remest/lambda_search.hpp"
#include "remest/simulate.hpp"

namespace remest {

// 20-point logarithmic period grid on [0.05, 20], the default comparator
// search space for the periodic baseline.
inline std::vector<double> default_period_grid(double lo = 0.05, double hi = 20.0,
                                               std::size_t n = 20) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("period grid: need 0 < lo < hi");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        grid[i] = lo * std::pow(hi / lo, t);
    }
    return grid;
}

struct SweepRow {
    double sigma2 = 0.0;
    double lambda_star = 0.0;
    double mse_opt = 0.0;
    double mse_opt_ci = 0.0;
    double mse_periodic = 0.0;
    double mse_periodic_ci = 0.0;
    double t_best = 0.0;
    std::uint64_t seed = 0;
};

struct SweepOptions {
    DelayKind family = DelayKind::lognormal;  // lognormal or discrete
    double mu_y = 1.0;
    std::vector<double> t_grid = default_period_grid();
    std::size_t n_epochs = 5000;
    double dt = 1e-3;
    int k_max = 10000;
    LambdaSearchOptions search;
};

// Delay-variance sweep: per sigma2, solve lambda*, simulate the solved
// policy and the best periodic comparator, and report both MSEs.
inline std::vector<SweepRow> sweep_sigma(double c_s, double c_tau,
                                         std::span<const double> sigma2_list,
                                         const SweepOptions& opts, std::uint64_t seed) {
    if (sigma2_list.empty())
        throw std::invalid_argument("sweep_sigma: sigma2_list must be nonempty");
    const Costs costs{c_s, c_tau};
    std::vector<SweepRow> rows;
    rows.reserve(sigma2_list.size());
    for (std::size_t r = 0; r < sigma2_list.size(); ++r) {
        const double sigma2 = sigma2_list[r];
        const DelayModel model =
            delay_model_with_mean_variance(opts.family, opts.mu_y, sigma2);
        LambdaSearchOptions search = opts.search;
        search.seed = seed;
        const LambdaStarResult sol = find_lambda_star(model, c_s, c_tau, search);

        const std::uint64_t salt = (r + 1) * 1000;
        const SimResult opt =
            run_simulation(PolicySpec::optimal(sol.policy), costs, model, opts.n_epochs,
                           opts.dt, opts.k_max, seed, salt);
        const PeriodicScan per = best_periodic(model, costs, opts.t_grid, opts.n_epochs,
                                               opts.dt, opts.k_max, seed, salt + 100);

        rows.push_back({sigma2, sol.lambda_star, opt.mse, opt.mse_ci_halfwidth,
                        per.best.mse, per.best.mse_ci_halfwidth, per.t_best, seed});
    }
    return rows;
}

// Value-iteration convergence trace at a fixed lambda; the caller plots
// (iteration, sup_diff).
inline SolveReport convergence_trace(double c_s, double c_tau, double lambda,
                                     const DelayModel& model, const SolverOptions& opts) {
    const CostParams params{c_s, c_tau, lambda};
    params.validate();
    const DelayMoments m = model.moments();
    const ErrorGrid grid = make_solver_grid(params, m.mean, opts);
    return solve_g_infinity(params, m.mean, grid, opts).second;
}

struct CurvePoint {
    double sigma2 = 0.0;
    double c_tau = 0.0;
    double e = 0.0;
    double z_star = 0.0;
};

struct PolicyCurves {
    std::vector<CurvePoint> fixed_lambda;    // every combination solved at the given lambda
    std::vector<CurvePoint> at_lambda_star;  // each combination solved at its own lambda*
};

// Waiting-time curves Z*(E) per (sigma2, c_tau) combination. At fixed
// lambda the curve depends only on c_s and lambda - mu_Y, so c_tau and
// sigma2 can move it only through the selection of lambda*; both
// readings are produced.
inline PolicyCurves policy_curves(double c_s, double lambda, double mu_y,
                                  std::span<const double> c_tau_list,
                                  std::span<const double> sigma2_list, DelayKind family,
                                  const LambdaSearchOptions& search,
                                  bool include_lambda_star = true) {
    if (c_tau_list.empty() || sigma2_list.empty())
        throw std::invalid_argument("policy_curves: parameter lists must be nonempty");
    PolicyCurves out;
    for (const double sigma2 : sigma2_list) {
        const DelayModel model = delay_model_with_mean_variance(family, mu_y, sigma2);
        for (const double c_tau : c_tau_list) {
            const CostParams params{c_s, c_tau, lambda};
            params.validate();
            const ErrorGrid grid = make_solver_grid(params, mu_y, search.solver);
            const auto [vf, report] = solve_g_infinity(params, mu_y, grid, search.solver);
            const Policy pol = extract_policy(vf, params, mu_y, search.solver,
                                              make_delay_grid(model, 2));
            for (std::size_t i = 0; i < pol.grid.size(); ++i)
                out.fixed_lambda.push_back(
                    {sigma2, c_tau, pol.grid.points[i], pol.z_star[i]});

            if (include_lambda_star) {
                const LambdaStarResult sol = find_lambda_star(model, c_s, c_tau, search);
                for (std::size_t i = 0; i < sol.policy.grid.size(); ++i)
                    out.at_lambda_star.push_back({sigma2, c_tau, sol.policy.grid.points[i],
                                                  sol.policy.z_star[i]});
            }
        }
    }
    return out;
}

}  // namespace remest
