#include <doctest.h>

#include "skewsym/errors.hpp"
#include "skewsym/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace skewsym;

TEST_CASE("finite and infinite ranges") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0).value == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY).value ==
          doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY).value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(x); }, -INFINITY, 0.0).value == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("reversed limits flip the sign") {
    CHECK(integrate([](double x) { return x; }, 2.0, 0.0).value == doctest::Approx(-2.0));
}

TEST_CASE("breakpoints resolve a narrow spike") {
    auto spike = [](double x) { return std::exp(-1e6 * (x - 0.7301) * (x - 0.7301)); };
    const std::vector<double> cuts{0.725, 0.7301, 0.735};
    const double expected = std::sqrt(std::numbers::pi / 1e6);
    CHECK(integrate_pieces(spike, -10.0, 10.0, cuts).value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("breakpoints outside the range are ignored") {
    const std::vector<double> cuts{-5.0, 0.5, 0.5, 7.0};
    CHECK(integrate_pieces([](double x) { return 3.0 * x * x; }, 0.0, 1.0, cuts).value == doctest::Approx(1.0));
}

TEST_CASE("non-convergence is reported") {
    QuadratureOptions opts;
    opts.max_intervals = 20;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / x) / x; }, 1e-6, 1.0, opts), NumericalError);
    CHECK_THROWS_AS(integrate([](double x) { return x; }, NAN, 1.0), DomainError);
}

TEST_CASE("error estimate shrinks with the interval") {
    // Short intervals far from the origin used to report errors larger than
    // the integral itself.
    auto r = integrate([](double) { return 1.0; }, 0.73, 0.7302);
    CHECK(r.value == doctest::Approx(0.0002).epsilon(1e-12));
    CHECK(r.error < 1e-15);
    auto g = integrate([](double x) { return std::exp(-x); }, 4.0, 4.25);
    CHECK(g.value == doctest::Approx(std::exp(-4.0) - std::exp(-4.25)).epsilon(1e-14));
    CHECK(g.error <= 1e-12 * g.l1);
}

TEST_CASE("infinite ranges") {
    const double pi = std::numbers::pi;
    CHECK(integrate([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY).value ==
          doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 1.0, INFINITY).value ==
          doctest::Approx(pi / 4).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(x); }, -INFINITY, 2.0).value ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(x); }, 2.0, -INFINITY).value ==
          doctest::Approx(-std::exp(2.0)).epsilon(1e-13));
}
