#pragma once

#include <functional>
#include <span>

namespace regimesplit {

/// Tolerances shared by every integral the library evaluates.
struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 200;
    /// Probability mass that may be dropped beyond the truncation points of infinite tails.
    double tail_mass_eps = 1e-13;

    /// Throws DomainError unless all tolerances are positive and max_subdivisions >= 1.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature over a finite interval.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * integral of |f|). Throws
/// NonIntegrable on non-finite values or when max_subdivisions is exhausted first.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg);

/// Same as integrate(), but splits [a, b] at every breakpoint lying strictly inside it.
/// Each piece gets its own subdivision budget.
QuadratureResult integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                           const QuadratureConfig& cfg);

/// Walks from `start` in direction `dir` (+1 or -1) over chunks of doubling width,
/// starting with `width`, and returns the first chunk end after which the chunk's
/// integral is below tail_mass_eps times the integral accumulated so far. Stops at
/// `limit` if it is reached first. f must be nonnegative.
///
/// Throws NonIntegrable if the walk overflows or fails to settle.
double tail_cutoff(const Integrand& f, double start, int dir, double width, double limit,
                   std::span<const double> breakpoints, const QuadratureConfig& cfg);

}  // namespace regimesplit
