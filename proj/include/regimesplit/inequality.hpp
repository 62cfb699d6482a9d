#pragma once

#include "regimesplit/density.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace regimesplit {

/// A convex potential V on [0, inf) whose exp(-V) is integrable.
///
/// Either piecewise linear (closed-form integrals) or an arbitrary callable
/// integrated numerically up to `domain_end` (V is +inf beyond it).
class ConvexPotential {
public:
    /// slopes[i] holds on [knots[i], knots[i+1]); the last slope runs to infinity.
    /// knots start at 0 and increase, slopes are nondecreasing, and the final slope
    /// must exceed 1e-6. Throws DomainError or NonIntegrable otherwise.
    static ConvexPotential piecewise_linear(std::vector<double> knots, std::vector<double> slopes, double v0);

    /// Convexity is taken on trust. hints.scale sets the first tail step and
    /// hints.breakpoints split the quadrature.
    static ConvexPotential from_function(std::function<double(double)> v, double domain_end = kInf,
                                         DensityHints hints = {}, QuadratureConfig quad = {});

    double operator()(double y) const;
    bool is_piecewise_linear() const { return !fn_; }

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& slopes() const { return slopes_; }
    double domain_end() const { return domain_end_; }
    const DensityHints& hints() const { return hints_; }
    const QuadratureConfig& quadrature() const { return quad_; }

private:
    ConvexPotential() = default;

    std::vector<double> knots_;
    std::vector<double> slopes_;
    double v0_ = 0.0;

    std::function<double(double)> fn_;
    double domain_end_ = kInf;
    DensityHints hints_;
    QuadratureConfig quad_;
};

struct LemmaSides {
    double lhs;  ///< exp(-V(0)) * integral of y exp(-V(y))
    double rhs;  ///< (integral of exp(-V(y)))^2
};

/// Both sides of the integral inequality lhs <= rhs.
/// Throws NonIntegrable if either integral diverges.
LemmaSides lemma_sides(const ConvexPotential& v);

struct LemmaCheck {
    bool holds;
    double lhs;
    double rhs;
    double slack;  ///< rhs - lhs
};

LemmaCheck check_lemma(const ConvexPotential& v, double tol = 1e-10);

/// u -> V(t + u) - V(t) for the potential of d, restricted to the support right of t.
/// The sign of lhs - rhs for this potential is the sign of the derivative of
/// residual_life at t.
ConvexPotential translated_potential(const Density1D& d, double t);

/// E[X - t | X > t]. Throws DegenerateRegime if P(X > t) vanishes.
double residual_life(const Density1D& d, double t);
/// E[t - X | X <= t]. Throws DegenerateRegime if P(X <= t) vanishes.
double inactivity_time(const Density1D& d, double t);

struct MonotonicityReport {
    int m_violations = 0;  ///< rises of residual_life beyond 1e-8
    int k_violations = 0;  ///< drops of inactivity_time beyond 1e-8
    double worst = 0.0;    ///< largest such rise or drop
    std::vector<double> grid;
    std::vector<double> residual;
    std::vector<double> inactivity;
};

/// Evaluates residual_life and inactivity_time at the quantiles i / (n + 1), i = 1..n,
/// and counts consecutive pairs that break monotonicity by more than `slack`.
/// Throws DomainError if n < 3.
MonotonicityReport monotonicity_probe(const Density1D& d, int n, double slack = 1e-8);

struct RandomPotentialOptions {
    double span = 10.0;  ///< knots lie in [0, span)
    /// Number of knots including 0. Unset: a unit-rate Poisson process on the span.
    std::optional<int> n_knots;
    double min_final_slope = 0.1;
};

/// Random piecewise-linear convex potential: knots from a unit-rate spacing
/// process, initial slope U(-1, 1), Exp(1) slope increments, V(0) ~ U(-1, 1),
/// and the final slope raised to at least min_final_slope.
ConvexPotential random_convex_potential(std::mt19937_64& rng, const RandomPotentialOptions& opts = {});

}  // namespace regimesplit
