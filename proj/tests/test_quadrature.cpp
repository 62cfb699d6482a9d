#include "doctest.h"

#include "regimesplit/errors.hpp"
#include "regimesplit/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace regimesplit;

TEST_CASE("polynomials are integrated exactly") {
    QuadratureConfig cfg;
    auto r = integrate([](double x) { return 3 * x * x; }, 0.0, 2.0, cfg);
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(r.subdivisions == 1);
}

TEST_CASE("smooth integrand to tight tolerance") {
    QuadratureConfig cfg;
    auto r = integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0, cfg);
    CHECK(std::abs(r.value - std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("reversed bounds flip the sign") {
    QuadratureConfig cfg;
    auto r = integrate([](double x) { return std::cos(x); }, std::numbers::pi / 2, 0.0, cfg);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("breakpoints make jumps exact") {
    QuadratureConfig cfg;
    auto step = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
    std::vector<double> bps{0.3};
    auto r = integrate(step, 0.0, 1.0, bps, cfg);
    CHECK(std::abs(r.value - (0.3 + 5 * 0.7)) < 1e-14);
}

TEST_CASE("subdivision budget is enforced") {
    QuadratureConfig cfg;
    cfg.max_subdivisions = 2;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(50 * x) * std::exp(x); }, 0.0, 10.0, cfg), NonIntegrable);
}

TEST_CASE("non-finite integrands are rejected") {
    QuadratureConfig cfg;
    CHECK_THROWS_AS(integrate([](double x) { return std::exp(x * x); }, 0.0, 100.0, cfg), NonIntegrable);
}

TEST_CASE("tail cutoff settles for decaying tails and fails otherwise") {
    QuadratureConfig cfg;
    const double cut = tail_cutoff([](double x) { return std::exp(-x); }, 0.0, +1, 1.0, INFINITY, {}, cfg);
    CHECK(std::exp(-cut) < 1e-12);
    CHECK_THROWS_AS(tail_cutoff([](double) { return 1.0; }, 0.0, +1, 1.0, INFINITY, {}, cfg), NonIntegrable);
    CHECK(tail_cutoff([](double) { return 1.0; }, 0.0, -1, 1.0, -5.0, {}, cfg) == -5.0);
}

TEST_CASE("config validation") {
    QuadratureConfig cfg;
    cfg.rel_tol = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.max_subdivisions = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}
