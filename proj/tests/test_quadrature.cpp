#include "catch_amalgamated.hpp"

#include <casimir/quadrature.hpp>

#include <cmath>
#include <complex>

using namespace casimir;

TEST_CASE("fixed Gauss-Legendre is exact on polynomials") {
    auto v = gl_integrate([](double x) { return x * x; }, 0.0, 1.0, 8);
    REQUIRE(v == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    auto w = gl_integrate([](double x) { return 5 * std::pow(x, 9) - x; }, -1.0, 2.0, 12);
    // antiderivative x^10/2 - x^2/2
    REQUIRE(w == Catch::Approx((std::pow(2.0, 10) - 1.0) / 2.0 - (4.0 - 1.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("adaptive integrator: smooth integrand") {
    auto q = adaptive_integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    REQUIRE(q.value == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(std::abs(q.value - 2.0) <= q.err + 1e-13);
}

TEST_CASE("adaptive integrator: near-singular peak with hint") {
    const double c = 1e-3;
    AdaptiveOptions opt;
    opt.hints = {0.0};
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-12;
    auto q = adaptive_integrate([c](double x) { return 1.0 / (x * x + c * c); }, -1.0, 1.0, opt);
    const double exact = 2.0 / c * std::atan(1.0 / c);
    REQUIRE(q.value == Catch::Approx(exact).epsilon(1e-10));
}

TEST_CASE("adaptive integrator: complex integrand") {
    auto q = adaptive_integrate(
        [](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, 1.0);
    std::complex<double> exact = (std::exp(std::complex<double>(0.0, 1.0)) - 1.0) /
                                 std::complex<double>(0.0, 1.0);
    REQUIRE(std::abs(q.value - exact) < 1e-12);
}

TEST_CASE("error estimate bounds the true error on an oscillatory integrand") {
    auto q = adaptive_integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0);
    const double exact = std::sin(40.0) / 40.0;
    REQUIRE(std::abs(q.value - exact) <= q.err + 1e-12);
}
