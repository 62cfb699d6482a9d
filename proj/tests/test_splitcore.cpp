#include "doctest.h"

#include "regimesplit/errors.hpp"
#include "regimesplit/splitcore.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace regimesplit;

namespace {

const PiecewiseConstSpec kTwoMaxima{{-2.0, -0.1, 0.1, 2.0}, {1.0 / 8, 21.0 / 8, 1.0 / 8}};
const double kTStar = 2 * std::sqrt(5.0) - 4;

// Closed-form score of the two-maxima law (even in t).
double two_maxima_score(double t) {
    t = std::abs(t);
    if (t <= 0.1) {
        const double m = -21.0 / 80 + 21.0 / 16 * t * t;
        return m * m / ((0.5 + 21.0 / 8 * t) * (0.5 - 21.0 / 8 * t));
    }
    return (2 - t) * (t + 2) * (t + 2) / (4 * (6 + t));
}

double norm_pdf(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("split_score examples") {
    CHECK(std::abs(split_score(make_family(GaussianSpec{}), 0.0) - 2 / std::numbers::pi) < 1e-12);
    auto u = make_family(UniformSpec{-1, 1});
    for (double t : {-0.7, 0.0, 0.3}) CHECK(std::abs(split_score(u, t) - (1 - t * t) / 4) < 1e-12);
    CHECK(std::abs(split_score(make_family(kTwoMaxima), 1.0) - 9.0 / 28) < 1e-13);
}

TEST_CASE("split_score at degenerate thresholds is mean squared") {
    auto g = make_family(GaussianSpec{3, 1});
    CHECK(split_score(g, -100.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(split_score(g, 100.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(split_score(make_family(UniformSpec{0, 1}), 1.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("conditional_levels examples") {
    auto lv = conditional_levels(make_family(UniformSpec{-1, 1}), 0.0);
    CHECK(std::abs(lv.alpha + 0.5) < 1e-13);
    CHECK(std::abs(lv.beta - 0.5) < 1e-13);
    const double h = std::sqrt(2 / std::numbers::pi);
    lv = conditional_levels(make_family(GaussianSpec{}), 0.0);
    CHECK(std::abs(lv.alpha + h) < 1e-11);
    CHECK(std::abs(lv.beta - h) < 1e-11);
    lv = conditional_levels(make_family(LaplaceSpec{}), 0.0);
    CHECK(std::abs(lv.alpha + 1) < 1e-10);
    CHECK(std::abs(lv.beta - 1) < 1e-10);
    CHECK_THROWS_AS(conditional_levels(make_family(UniformSpec{-1, 1}), 1.5), DegenerateRegime);
}

TEST_CASE("reduced_objective examples") {
    CHECK(std::abs(reduced_objective(make_family(UniformSpec{-1, 1}), 0.0) - 1.0 / 12) < 1e-12);
    CHECK(std::abs(reduced_objective(make_family(GaussianSpec{}), 0.0) - (1 - 2 / std::numbers::pi)) < 1e-11);
    CHECK(reduced_objective(EmpiricalDist({{-1, 1}, {1, 1}}), 0.0) == 0.0);
    // Direct two-level error at the conditional levels.
    auto g = make_family(LaplaceSpec{0.5, 1.5});
    const double c = 1.1;
    const auto lv = conditional_levels(g, c);
    const auto r = g.effective_range();
    const double direct = g.expect([&](double x) { return (x - lv.alpha) * (x - lv.alpha); }, r.lo, c) +
                          g.expect([&](double x) { return (x - lv.beta) * (x - lv.beta); }, c, r.hi);
    CHECK(std::abs(reduced_objective(g, c) - direct) < 1e-8);
}

TEST_CASE("residual_gap examples") {
    for (FamilySpec f : {FamilySpec{GaussianSpec{3, 2}}, FamilySpec{LaplaceSpec{}}, FamilySpec{UniformSpec{-1, 3}}}) {
        auto d = make_family(f);
        CHECK(std::abs(residual_gap(d, d.mean())) < 1e-10);
    }
    const double m1 = norm_pdf(1) / (1 - norm_cdf(1)) - 1;
    const double k1 = 1 + norm_pdf(1) / norm_cdf(1);
    const double gap = residual_gap(make_family(GaussianSpec{}), 1.0);
    CHECK(std::abs(gap - (m1 - k1)) < 1e-10);
    CHECK(std::abs(gap + 0.763) < 1e-3);
    // Independent quadrature (scipy) reference for the Laplace law at t = -2.
    CHECK(std::abs(residual_gap(make_family(LaplaceSpec{}), -2.0) - 1.217736650487262) < 1e-9);
    CHECK_THROWS_AS(residual_gap(make_family(UniformSpec{0, 1}), 0.0), DegenerateRegime);
}

TEST_CASE("solve_logconcave examples") {
    auto r = solve_logconcave(make_family(GaussianSpec{3, 2}));
    REQUIRE(r.thresholds.size() == 1);
    const double h = 2 * std::sqrt(2 / std::numbers::pi);
    CHECK(std::abs(r.thresholds[0] - 3) < 1e-8);
    CHECK(std::abs(r.alpha - (3 - h)) < 1e-7);
    CHECK(std::abs(r.beta - (3 + h)) < 1e-7);
    CHECK(r.method == SplitMethod::logconcave_bisection);

    r = solve_logconcave(make_family(LaplaceSpec{}));
    CHECK(std::abs(r.thresholds[0]) < 1e-8);
    CHECK(std::abs(r.alpha + 1) < 1e-8);
    CHECK(std::abs(r.beta - 1) < 1e-8);
    CHECK(std::abs(r.objective - 1) < 1e-8);

    const double k = weibull_mean_median_k();
    r = solve_logconcave(make_family(WeibullSpec{k}));
    CHECK(std::abs(r.thresholds[0] - std::tgamma(1 + 1 / k)) < 1e-4);

    CHECK_THROWS_AS(solve_logconcave(make_family(kTwoMaxima)), NotLogConcave);
}

TEST_CASE("SplitResult invariants hold on recomputation") {
    for (FamilySpec f : {FamilySpec{GaussianSpec{1, 3}}, FamilySpec{WeibullSpec{1.5}}, FamilySpec{LaplaceSpec{-2, 0.3}}}) {
        auto d = make_family(f);
        auto r = solve_logconcave(d);
        const double c = r.thresholds[0];
        CHECK(std::abs(r.alpha - partial_mean(d, c, Side::lower) / tail_mass(d, c, Side::lower)) < 1e-12);
        CHECK(std::abs(r.beta - partial_mean(d, c, Side::upper) / tail_mass(d, c, Side::upper)) < 1e-12);
        CHECK(std::abs(r.objective - (d.second_moment() - r.fx_value)) < 1e-8);
        CHECK(r.alpha < r.beta);
    }
}

TEST_CASE("solve_global finds both maximizers of the two-maxima law") {
    auto d = make_family(kTwoMaxima);
    auto r = solve_global(d);
    REQUIRE(r.thresholds.size() == 2);
    CHECK(std::abs(r.thresholds[0] + kTStar) < 1e-6);
    CHECK(std::abs(r.thresholds[1] - kTStar) < 1e-6);
    CHECK(std::abs(r.fx_value - two_maxima_score(kTStar)) < 1e-7);
    CHECK(split_score(d, kTStar) > split_score(d, 0.1));
    CHECK(std::abs(two_maxima_score(kTStar) - 0.360679) < 1e-6);
    CHECK(std::abs(two_maxima_score(0.1) - 0.343402) < 1e-6);
    CHECK(r.method == SplitMethod::global_grid);
}

TEST_CASE("solve_global agrees with solve_logconcave on a Gaussian") {
    auto d = make_family(GaussianSpec{});
    auto g = solve_global(d);
    REQUIRE(g.thresholds.size() == 1);
    CHECK(std::abs(g.thresholds[0] - solve_logconcave(d).thresholds[0]) < 1e-8);
    CHECK_THROWS_AS(solve_global(d, 10), DomainError);
}

TEST_CASE("solve_empirical examples") {
    auto r = solve_empirical(EmpiricalDist({{-1, 1}, {1, 1}}));
    REQUIRE(r.thresholds.size() == 1);
    CHECK(r.thresholds[0] == 0.0);
    CHECK(r.alpha == -1.0);
    CHECK(r.beta == 1.0);
    CHECK(r.objective == 0.0);

    // Enumerated splits: {0}|{1,3} has error 2/3 per unit mass, {0,1}|{3} has 1/6.
    r = solve_empirical(EmpiricalDist({{0, 1}, {1, 1}, {3, 1}}));
    REQUIRE(r.thresholds.size() == 1);
    CHECK(r.thresholds[0] == 2.0);
    CHECK(std::abs(r.alpha - 0.5) < 1e-15);
    CHECK(std::abs(r.beta - 3.0) < 1e-15);
    CHECK(std::abs(r.objective - 1.0 / 6) < 1e-15);
    CHECK(std::abs(reduced_objective(EmpiricalDist({{0, 1}, {1, 1}, {3, 1}}), 0.5) - 2.0 / 3) < 1e-15);

    r = solve_empirical(EmpiricalDist({{-1, 1}, {0, 2}, {1, 1}}));
    REQUIRE(r.thresholds.size() == 2);
    CHECK(r.thresholds[0] == -0.5);
    CHECK(r.thresholds[1] == 0.5);

    CHECK_THROWS_AS(solve_empirical(EmpiricalDist({{1, 1}, {1, 3}})), DomainError);
}

TEST_CASE("solve_empirical matches brute-force enumeration") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> wgt(0.1, 2.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<EmpiricalDist::Atom> atoms;
        for (int i = 0; i < 25; ++i) atoms.push_back({z(rng), wgt(rng)});
        EmpiricalDist e(atoms);
        double best = kInf;
        for (std::size_t k = 0; k + 1 < e.atoms().size(); ++k) {
            // Brute force: direct squared error around the two conditional means.
            double w1 = 0, s1 = 0, w2 = 0, s2 = 0;
            for (std::size_t i = 0; i < e.atoms().size(); ++i)
                (i <= k ? w1 : w2) += e.atoms()[i].weight, (i <= k ? s1 : s2) += e.atoms()[i].weight * e.atoms()[i].value;
            double sse = 0;
            for (std::size_t i = 0; i < e.atoms().size(); ++i) {
                const double lvl = i <= k ? s1 / w1 : s2 / w2;
                sse += e.atoms()[i].weight * (e.atoms()[i].value - lvl) * (e.atoms()[i].value - lvl);
            }
            best = std::min(best, sse / e.total_weight());
        }
        auto r = solve_empirical(e);
        CHECK(std::abs(r.objective - best) < 1e-12);
        CHECK(std::abs(reduced_objective(e, r.thresholds[0]) - best) < 1e-12);
    }
}

TEST_CASE("regime_boundary_convex_1d examples") {
    auto r = regime_boundary_convex_1d([](double x) { return x * x; }, 0, 1, {-10, 10});
    CHECK(r.kind == BoundaryKind::halfline_left);
    CHECK(std::abs(*r.boundary - 0.5) < 1e-12);

    r = regime_boundary_convex_1d([](double x) { return std::abs(x); }, -1, 1, {-10, 10});
    CHECK(r.kind == BoundaryKind::halfline_left);
    CHECK(std::abs(*r.boundary) < 1e-12);

    r = regime_boundary_convex_1d([](double x) { return x * x * x * x; }, 0, 2, {-10, 10});
    CHECK(r.kind == BoundaryKind::halfline_left);
    CHECK(std::abs(*r.boundary - 1) < 1e-12);

    r = regime_boundary_convex_1d([](double x) { return x * x; }, 1, 0, {-10, 10});
    CHECK(r.kind == BoundaryKind::halfline_right);
    CHECK(std::abs(*r.boundary - 0.5) < 1e-12);

    CHECK(regime_boundary_convex_1d([](double x) { return x * x; }, 0, 1, {2, 10}).kind == BoundaryKind::empty);
    CHECK(regime_boundary_convex_1d([](double x) { return x * x; }, 0, 1, {-10, 0}).kind == BoundaryKind::all);
    CHECK_THROWS_AS(regime_boundary_convex_1d([](double x) { return x * x; }, 1, 1, {-1, 1}), DomainError);
}

TEST_CASE("sweep examples") {
    auto t = sweep(make_family(GaussianSpec{}), -3, 3, 7);
    REQUIRE(t.rows.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(t.rows[i].fx - t.rows[6 - i].fx) < 1e-8);
    for (std::size_t i = 1; i < 7; ++i) CHECK(t.rows[i].t > t.rows[i - 1].t);

    t = sweep(make_family(UniformSpec{-1, 1}), -0.9, 0.9, 19);
    for (const auto& row : t.rows) CHECK(std::abs(row.fx - (1 - row.t * row.t) / 4) < 1e-9);

    t = sweep(make_family(kTwoMaxima), -1.95, 1.95, 391);
    for (const auto& row : t.rows) CHECK(std::abs(row.fx - two_maxima_score(row.t)) < 1e-7);

    t = sweep(make_family(UniformSpec{0, 1}), -1, 2, 4);
    CHECK_FALSE(t.rows[0].mk_gap.has_value());
    CHECK(t.rows[0].cdf == 0.0);
    CHECK_THROWS_AS(sweep(make_family(GaussianSpec{}), 1, 0, 5), DomainError);
}

TEST_CASE("shift identity") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0, 1);
    const std::vector<FamilySpec> fams{GaussianSpec{0.5, 1.3}, LaplaceSpec{-0.4, 0.7}, UniformSpec{-1, 2}, WeibullSpec{2.2},
                                       kTwoMaxima};
    for (int pair = 0; pair < 20; ++pair) {
        auto base = make_family(fams[static_cast<std::size_t>(pair) % fams.size()]);
        auto x = affine(base, 1.0, -3 + 6 * unit(rng));
        const double mu = x.mean();
        auto y = affine(x, 1.0, -mu);
        for (int i = 0; i < 20; ++i) {
            const double t = quantile(x, 0.001 + 0.998 * unit(rng));
            CHECK(std::abs(split_score(x, t) - split_score(y, t - mu) - mu * mu) < 1e-8);
        }
    }
}

TEST_CASE("critical point of the log-concave solver") {
    for (FamilySpec f : {FamilySpec{GaussianSpec{1, 2}}, FamilySpec{WeibullSpec{1.0}}, FamilySpec{WeibullSpec{5.0}}}) {
        auto d = make_family(f);
        const double c = solve_logconcave(d).thresholds[0];
        CHECK(std::abs(residual_gap(d, c)) < 1e-8);
        const double iqr = quantile(d, 0.75) - quantile(d, 0.25);
        for (double h : {1e-3, 1e-2}) {
            CHECK(split_score(d, c + h * iqr) < split_score(d, c));
            CHECK(split_score(d, c - h * iqr) < split_score(d, c));
        }
    }
}

TEST_CASE("monotone descent from the mean for weakly symmetric log-concave laws") {
    for (FamilySpec f : {FamilySpec{GaussianSpec{3, 2}}, FamilySpec{LaplaceSpec{}}, FamilySpec{UniformSpec{-1, 1}}}) {
        auto d = make_family(f);
        const double mu = d.mean();
        const double hi = quantile(d, 1 - 1e-6);
        double prev = split_score(d, mu);
        for (int i = 1; i < 200; ++i) {
            const double s = split_score(d, mu + (hi - mu) * i / 199.0);
            CHECK(s <= prev + 1e-8);
            prev = s;
        }
    }
}

TEST_CASE("a skewed log-concave law is split away from its mean") {
    auto d = make_family(WeibullSpec{1.0});
    const double c = solve_logconcave(d).thresholds[0];
    CHECK(std::abs(c - d.mean()) > 1e-3);
    CHECK(std::abs(cdf(d, d.mean()) - 0.5) > 1e-3);
}
