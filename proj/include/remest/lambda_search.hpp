#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "remest/bellman.hpp"
#include "remest/policy.hpp"

namespace remest {

enum class DelayExpectation { quadrature, monte_carlo };

struct LambdaSearchOptions {
    SolverOptions solver;
    double tol_lambda = 1e-4;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;  // 0 = heuristic c_s + c_tau + 10 (mu_Y + 1)
    DelayExpectation delay_expectation = DelayExpectation::quadrature;
    int n_quad_delay = 64;
    std::size_t n_mc_delay = 10000;
    std::uint64_t mc_stream = 0xde1a1;  // fixed across lambda evaluations
    std::uint64_t seed = 1;
    std::size_t first_step_grid = 1025;

    void validate() const {
        solver.validate();
        if (!(tol_lambda > 0.0)) throw std::invalid_argument("solver.tol_lambda: must be > 0");
        if (n_quad_delay < 2) throw std::invalid_argument("solver.n_quad_delay: must be >= 2");
        if (n_mc_delay < 1) throw std::invalid_argument("solver.n_mc_delay: must be >= 1");
    }
};

struct JEvaluation {
    double j = 0.0;
    double h0 = 0.0;
    double first_step_expectation = 0.0;  // E_Y[ first_step_value(Y) ]
    ValueFunction vf;
    SolveReport report;
};

namespace detail {

// E_Y[first_step_value(Y)]: exact for point masses and atoms, Gauss
// quadrature (Hermite in log space, Laguerre for exponential) or seeded
// Monte Carlo for the continuous families.
inline double expected_first_step(const DelayModel& model, const ValueFunction& vf,
                                  const CostParams& p, double mu_y,
                                  const LambdaSearchOptions& opts,
                                  const QuadratureRule& quad) {
    const auto value_at = [&](double y) {
        return first_step_value(y, vf, p, mu_y, opts.solver, quad).value;
    };
    switch (model.kind) {
        case DelayKind::deterministic:
            return value_at(model.d);
        case DelayKind::discrete: {
            double acc = 0.0;
            for (std::size_t i = 0; i < model.values.size(); ++i)
                if (model.probs[i] > 0.0) acc += model.probs[i] * value_at(model.values[i]);
            return acc;
        }
        case DelayKind::lognormal: {
            if (model.scale == 0.0) return value_at(std::exp(model.location));
            if (opts.delay_expectation == DelayExpectation::quadrature) {
                const QuadratureRule gq = gauss_hermite_normal(opts.n_quad_delay);
                double acc = 0.0;
                for (int k = 0; k < gq.size(); ++k)
                    acc += gq.weights[k] *
                           value_at(std::exp(model.location + model.scale * gq.points[k]));
                return acc;
            }
            break;
        }
        case DelayKind::exponential: {
            if (opts.delay_expectation == DelayExpectation::quadrature) {
                const QuadratureRule gq = gauss_laguerre_unit(opts.n_quad_delay);
                double acc = 0.0;
                for (int k = 0; k < gq.size(); ++k)
                    acc += gq.weights[k] * value_at(gq.points[k] / model.rate);
                return acc;
            }
            break;
        }
    }
    // Monte Carlo fallback: one fixed stream per configuration so every
    // lambda evaluation sees the same delay draws.
    RngStream rng(opts.seed, opts.mc_stream);
    double acc = 0.0;
    for (std::size_t i = 0; i < opts.n_mc_delay; ++i) acc += value_at(model.sample(rng));
    return acc / static_cast<double>(opts.n_mc_delay);
}

}  // namespace detail

// Priced per-epoch cost of the optimal policy at a given lambda:
//   J(lambda) = h_0 + E_Y[ min_{Z1} ( h(Z1, Y) + E[g_inf(E_1)] ) ].
// Its sign locates lambda*: J > 0 below, J < 0 above.
inline JEvaluation evaluate_J(double lambda, const DelayModel& model, double c_s,
                              double c_tau, const LambdaSearchOptions& opts) {
    opts.validate();
    const CostParams params{c_s, c_tau, lambda};
    params.validate();
    const DelayMoments m = model.moments();
    const ErrorGrid grid = make_solver_grid(params, m.mean, opts.solver);

    JEvaluation ev;
    auto [vf, report] = solve_g_infinity(params, m.mean, grid, opts.solver);
    ev.vf = std::move(vf);
    ev.report = std::move(report);
    ev.h0 = h_zero(params, m);
    const QuadratureRule quad = gauss_legendre_unit(opts.solver.n_quad);
    ev.first_step_expectation =
        detail::expected_first_step(model, ev.vf, params, m.mean, opts, quad);
    ev.j = ev.h0 + ev.first_step_expectation;
    ev.report.j_value = ev.j;
    return ev;
}

struct LambdaStarResult {
    double lambda_star = 0.0;
    double j_at_star = 0.0;
    Policy policy;
    ValueFunction vf;
    SolveReport report;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<std::pair<double, double>> evaluations;  // (lambda, J)
};

// Bisection on the sign of J. The bracket expands geometrically if the
// initial guess does not straddle the root.
inline LambdaStarResult find_lambda_star(const DelayModel& model, double c_s,
                                         double c_tau, const LambdaSearchOptions& opts) {
    opts.validate();
    const DelayMoments m = model.moments();
    LambdaStarResult out;

    const auto j_at = [&](double lambda) {
        const double j = evaluate_J(lambda, model, c_s, c_tau, opts).j;
        out.evaluations.emplace_back(lambda, j);
        return j;
    };

    double lo = opts.bracket_lo;
    double hi = opts.bracket_hi > 0.0 ? opts.bracket_hi
                                      : c_s + c_tau + 10.0 * (m.mean + 1.0);
    double j_lo = j_at(lo);
    int guard = 0;
    while (j_lo <= 0.0 && lo > 0.0) {
        lo = lo > 1e-12 ? lo / 4.0 : 0.0;
        j_lo = j_at(lo);
        if (++guard > 60)
            throw std::runtime_error("find_lambda_star: no positive J at the lower bracket");
    }
    if (j_lo <= 0.0)
        throw std::runtime_error("find_lambda_star: J(0) <= 0; configuration rejected");

    double j_hi = j_at(hi);
    guard = 0;
    while (j_hi >= 0.0) {
        lo = hi;
        j_lo = j_hi;
        hi *= 2.0;
        j_hi = j_at(hi);
        if (++guard > 60)
            throw std::runtime_error(
                "find_lambda_star: bracket expansion failed; J never becomes negative");
    }

    out.bracket_lo = lo;
    out.bracket_hi = hi;
    while (hi - lo > opts.tol_lambda) {
        const double mid = 0.5 * (lo + hi);
        const double j_mid = j_at(mid);
        if (j_mid > 0.0)
            lo = mid;
        else
            hi = mid;
        if (j_mid == 0.0) break;
    }

    out.lambda_star = 0.5 * (lo + hi);
    JEvaluation final_eval = evaluate_J(out.lambda_star, model, c_s, c_tau, opts);
    out.j_at_star = final_eval.j;
    out.vf = std::move(final_eval.vf);
    out.report = std::move(final_eval.report);
    const CostParams params{c_s, c_tau, out.lambda_star};
    out.policy = extract_policy(out.vf, params, m.mean, opts.solver,
                                make_delay_grid(model, opts.first_step_grid));
    return out;
}

}  // namespace remest
