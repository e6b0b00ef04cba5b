#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "remest/quadrature.hpp"

using namespace remest;

namespace {

double expect(const QuadratureRule& q, double (*f)(double)) {
    double acc = 0;
    for (int i = 0; i < q.size(); ++i) acc += q.weights[i] * f(q.points[i]);
    return acc;
}

}  // namespace

TEST_CASE("normal rule reproduces Gaussian moments") {
    for (const int n : {5, 17, 33, 64}) {
        const auto q = gauss_hermite_normal(n);
        double wsum = 0;
        for (double w : q.weights) wsum += w;
        REQUIRE(wsum == Catch::Approx(1.0).epsilon(1e-14));
        REQUIRE(std::abs(expect(q, [](double x) { return x; })) < 1e-13);
        REQUIRE(expect(q, [](double x) { return x * x; }) == Catch::Approx(1.0).epsilon(1e-12));
        REQUIRE(expect(q, [](double x) { return x * x * x * x; }) ==
                Catch::Approx(3.0).epsilon(1e-11));
        REQUIRE(expect(q, [](double x) { return std::pow(x, 6); }) ==
                Catch::Approx(15.0).epsilon(1e-10));
    }
}

TEST_CASE("normal rule integrates the lognormal mean") {
    const auto q = gauss_hermite_normal(33);
    const double scale = std::sqrt(0.1);
    double acc = 0;
    for (int i = 0; i < q.size(); ++i) acc += q.weights[i] * std::exp(scale * q.points[i]);
    REQUIRE(acc == Catch::Approx(std::exp(0.05)).epsilon(1e-12));
}

TEST_CASE("exponential rule reproduces exponential moments") {
    for (const int n : {8, 32, 64}) {
        const auto q = gauss_laguerre_unit(n);
        double wsum = 0;
        for (double w : q.weights) wsum += w;
        REQUIRE(wsum == Catch::Approx(1.0).epsilon(1e-13));
        REQUIRE(expect(q, [](double x) { return x; }) == Catch::Approx(1.0).epsilon(1e-11));
        REQUIRE(expect(q, [](double x) { return x * x; }) == Catch::Approx(2.0).epsilon(1e-10));
        REQUIRE(expect(q, [](double x) { return x * x * x; }) ==
                Catch::Approx(6.0).epsilon(1e-9));
    }
}

TEST_CASE("legendre rule integrates polynomials and the gaussian density") {
    for (const int n : {9, 33}) {
        const auto q = gauss_legendre_unit(n);
        double wsum = 0;
        for (double w : q.weights) wsum += w;
        REQUIRE(wsum == Catch::Approx(2.0).epsilon(1e-14));
        REQUIRE(expect(q, [](double x) { return x * x; }) ==
                Catch::Approx(2.0 / 3.0).epsilon(1e-13));
        REQUIRE(std::abs(expect(q, [](double x) { return x * x * x; })) < 1e-14);
    }
    // mapped onto [-8.5, 8.5], the rule integrates the normal density to
    // machine precision
    const auto q = gauss_legendre_unit(33);
    const double half = 8.5;
    double mass = 0;
    for (int i = 0; i < q.size(); ++i) {
        const double u = half * q.points[i];
        mass += q.weights[i] * half * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
    }
    REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate sizes are rejected") {
    REQUIRE_THROWS_AS(gauss_hermite_normal(0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_laguerre_unit(0), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_legendre_unit(0), std::invalid_argument);
}
