#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "remest/bellman.hpp"

using namespace remest;

namespace {

// analytic one-step value: min{0, c_s - ((delta - E)^+)^2 / 2}
double g1_closed_form(double e, double c_s, double delta) {
    const double gap = std::max(delta - e, 0.0);
    return std::min(0.0, c_s - 0.5 * gap * gap);
}

SolverOptions fast_options(std::size_t n_points = 801) {
    SolverOptions o;
    o.n_points = n_points;
    o.threads = 2;
    return o;
}

}  // namespace

TEST_CASE("stage cost: zero wait always costs exactly c_s") {
    const CostParams p{2.0, 5.0, 10.0};
    for (const double x : {0.0, 0.3, 5.0, 100.0})
        REQUIRE(stage_cost_h(0.0, x, p, 1.0) == 2.0);
}

TEST_CASE("stage cost: hand-evaluated points") {
    // lambda = mu_Y: reduces to z^2/2 + z*x + c_s
    const CostParams a{2.0, 5.0, 1.0};
    REQUIRE(stage_cost_h(1.0, 1.0, a, 1.0) == Catch::Approx(3.5).epsilon(1e-15));

    // (4+5-9)^2/2 - (5-9)^2/2 + 2 = -6
    const CostParams b{2.0, 5.0, 10.0};
    REQUIRE(stage_cost_h(4.0, 5.0, b, 1.0) == Catch::Approx(-6.0).epsilon(1e-15));

    REQUIRE_THROWS_AS(stage_cost_h(-1.0, 0.0, b, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(stage_cost_h(0.0, -1.0, b, 1.0), std::invalid_argument);
}

TEST_CASE("constant epoch cost h_zero") {
    const CostParams p{2.0, 5.0, 10.0};
    REQUIRE(h_zero(p, DelayModel::deterministic(1.0).moments()) ==
            Catch::Approx(-3.5).epsilon(1e-15));

    // lambda = mu_Y: c_tau + E[Y^2]/2
    const CostParams q{2.0, 5.0, 1.0};
    const auto m = DelayModel::exponential(1.0).moments();
    REQUIRE(h_zero(q, m) == Catch::Approx(5.0 + 1.0).epsilon(1e-15));

    // zero delay, lambda 0: just c_tau
    const CostParams r{2.0, 5.0, 0.0};
    REQUIRE(h_zero(r, DelayModel::deterministic(0.0).moments()) == 5.0);
}

TEST_CASE("transition expectation") {
    auto grid = ErrorGrid::uniform(10.0, 101);
    ValueFunction vf = ValueFunction::zero(grid);

    SECTION("zero wait is the identity") {
        for (std::size_t i = 0; i < vf.values.size(); ++i)
            vf.values[i] = -std::sin(0.7 * grid.points[i]);
        for (const double e : {0.0, 0.5, 3.3, 9.9})
            REQUIRE(transition_expectation(vf, e, 0.0, 33) == vf(e));
    }

    SECTION("zero function maps to zero") {
        for (const double e : {0.0, 1.0, 5.0})
            for (const double z : {0.1, 1.0, 4.0})
                REQUIRE(transition_expectation(vf, e, z, 33) == 0.0);
    }

    SECTION("constant function maps to the constant when mass stays in range") {
        // large grid so the transition cannot escape
        auto wide = ErrorGrid::uniform(4000.0, 4001);
        ValueFunction cf = ValueFunction::zero(wide);
        for (auto& v : cf.values) v = -2.5;
        REQUIRE(transition_expectation(cf, 1.0, 2.0, 33) ==
                Catch::Approx(-2.5).epsilon(1e-10));
        REQUIRE(transition_expectation(cf, 0.0, 5.0, 65) ==
                Catch::Approx(-2.5).epsilon(1e-10));
    }

    SECTION("negative wait is rejected") {
        REQUIRE_THROWS_AS(transition_expectation(vf, 1.0, -0.1, 33), std::invalid_argument);
    }
}

TEST_CASE("one backup from zero reproduces the closed form") {
    const CostParams p{2.0, 5.0, 10.0};
    const double mu_y = 1.0;
    const double delta = 9.0;
    const SolverOptions opts = fast_options(2001);
    const ErrorGrid grid = make_solver_grid(p, mu_y, opts);
    const ValueFunction g0 = ValueFunction::zero(grid);

    const auto res =
        bellman_backup_detailed(g0, p, mu_y, opts, gauss_hermite_normal(opts.n_quad));

    double sup = 0.0, worst_z = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = grid.points[i];
        sup = std::max(sup, std::abs(res.vf.values[i] - g1_closed_form(e, p.c_s, delta)));
        worst_z = std::max(worst_z, std::abs(res.z_inner[i] - std::max(delta - e, 0.0)));
    }
    REQUIRE(sup <= 1e-9);
    REQUIRE(worst_z <= 1e-5);

    // transmit immediately once the error passes delta
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.points[i] >= delta) REQUIRE(res.vf.values[i] == 0.0);

    // hand value at E = 5: -6 with z* = 4
    const std::size_t i5 = grid.cell(5.0);
    REQUIRE(grid.points[i5] == Catch::Approx(5.0).margin(grid.step));
    const double e5 = grid.points[i5];
    REQUIRE(res.vf.values[i5] ==
            Catch::Approx(g1_closed_form(e5, 2.0, 9.0)).margin(1e-9));
}

TEST_CASE("trivial fixed points") {
    SECTION("huge sampling cost stops immediately and converges in one pass") {
        const CostParams p{60.0, 5.0, 10.0};  // c_s > delta^2/2 = 40.5
        const auto [vf, rep] =
            solve_g_infinity(p, 1.0, make_solver_grid(p, 1.0, fast_options(401)),
                             fast_options(401));
        REQUIRE(rep.converged);
        REQUIRE(rep.iterations == 1);
        for (double v : vf.values) REQUIRE(v == 0.0);
    }
    SECTION("lambda below the mean delay never samples") {
        const CostParams p{2.0, 5.0, 0.5};
        const auto [vf, rep] =
            solve_g_infinity(p, 1.0, make_solver_grid(p, 1.0, fast_options(401)),
                             fast_options(401));
        REQUIRE(rep.converged);
        for (double v : vf.values) REQUIRE(v == 0.0);
    }
}

TEST_CASE("value iteration: monotone, bounded, geometric") {
    const CostParams p{2.0, 5.0, 10.0};
    const double mu_y = 1.0;
    const SolverOptions opts = fast_options(801);
    const ErrorGrid grid = make_solver_grid(p, mu_y, opts);
    const QuadratureRule quad = gauss_legendre_unit(opts.n_quad);

    SECTION("g stays nonpositive and decreases with the horizon") {
        ValueFunction g = ValueFunction::zero(grid);
        for (int r = 0; r < 12; ++r) {
            const ValueFunction next =
                bellman_backup_detailed(g, p, mu_y, opts, quad).vf;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                REQUIRE(next.values[i] <= 0.0);
                REQUIRE(next.values[i] <= g.values[i] + 1e-12);
            }
            g = next;
        }
    }

    SECTION("converged solve: residual bound and geometric tail") {
        const auto [vf, rep] = solve_g_infinity(p, mu_y, grid, opts);
        REQUIRE(rep.converged);
        REQUIRE(rep.sup_diffs.back() <= opts.tol);

        // g1(0) = 2 - 40.5; monotonicity forces the fixed point below it
        REQUIRE(vf.values.front() <= -38.5 + 1e-9);

        // one extra backup moves the fixed point by at most 2 tol
        const ValueFunction extra = bellman_backup_detailed(vf, p, mu_y, opts, quad).vf;
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            sup = std::max(sup, std::abs(extra.values[i] - vf.values[i]));
        REQUIRE(sup <= 2.0 * opts.tol);

        // contraction trend over the last ten iterations
        const auto& d = rep.sup_diffs;
        REQUIRE(d.size() >= 11);
        for (std::size_t i = d.size() - 10; i < d.size(); ++i)
            REQUIRE(d[i] < d[i - 1]);
    }
}

TEST_CASE("grid construction guards its invariants") {
    REQUIRE_THROWS_AS(ErrorGrid::uniform(0.0, 101), std::invalid_argument);
    REQUIRE_THROWS_AS(ErrorGrid::uniform(1.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(ErrorGrid::from_points({0.5, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(ErrorGrid::from_points({0.0, 1.0, 1.0}), std::invalid_argument);
    const auto g = ErrorGrid::from_points({0.0, 0.5, 2.0});
    REQUIRE(g.size() == 3);
    REQUIRE(g.e_max() == 2.0);
    const std::vector<double> v{-3.0, -1.0, 0.0};
    REQUIRE(interpolate_on_grid(g, v, 0.25) == -2.0);
    REQUIRE(interpolate_on_grid(g, v, 5.0) == 0.0);
}

TEST_CASE("parallel backups match the serial order bit for bit") {
    const CostParams p{2.0, 5.0, 10.0};
    SolverOptions serial = fast_options(401);
    serial.threads = 1;
    SolverOptions parallel = fast_options(401);
    parallel.threads = 4;
    const auto [vs, rs] = solve_g_infinity(p, 1.0, make_solver_grid(p, 1.0, serial), serial);
    const auto [vp, rp] =
        solve_g_infinity(p, 1.0, make_solver_grid(p, 1.0, parallel), parallel);
    REQUIRE(vs.values == vp.values);
    REQUIRE(rs.sup_diffs == rp.sup_diffs);
}

TEST_CASE("g depends only on c_s and lambda - mu_Y") {
    const SolverOptions opts = fast_options(801);
    const CostParams a{2.0, 5.0, 10.0};
    const CostParams b{2.0, 0.3, 12.0};  // same delta = 9, different c_tau too
    const auto [va, ra] = solve_g_infinity(a, 1.0, make_solver_grid(a, 1.0, opts), opts);
    const auto [vb, rb] = solve_g_infinity(b, 3.0, make_solver_grid(b, 3.0, opts), opts);
    REQUIRE(va.values.size() == vb.values.size());
    for (std::size_t i = 0; i < va.values.size(); ++i)
        REQUIRE(std::abs(va.values[i] - vb.values[i]) <= 1e-12);
}
