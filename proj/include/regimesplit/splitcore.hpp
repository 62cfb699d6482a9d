#pragma once

#include "regimesplit/density.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace regimesplit {

enum class SplitMethod { logconcave_bisection, global_grid, empirical_exact };

std::string to_string(SplitMethod m);

/// Optimal two-level quadratic approximation alpha 1{X <= c} + beta 1{X > c}.
struct SplitResult {
    /// Every optimal threshold found, ascending; levels below refer to thresholds[0].
    std::vector<double> thresholds;
    double alpha = 0.0;      ///< E[X | X <= c]
    double beta = 0.0;       ///< E[X | X > c]
    double objective = 0.0;  ///< minimal mean squared error E[X^2] - fx_value
    double fx_value = 0.0;   ///< split_score at c
    SplitMethod method = SplitMethod::logconcave_bisection;
};

struct RegimeLevels {
    double alpha;
    double beta;
};

/// E[X, X <= t]^2 / P(X <= t) + E[X, X > t]^2 / P(X > t).
///
/// Maximizing this over t is equivalent to minimizing the two-level mean squared
/// error. Where P(X <= t) is 0 or 1 (within abs_tol) it returns its limit, mean^2.
double split_score(const Density1D& d, double t);

/// Conditional means on either side of c. Throws DegenerateRegime if one side has no mass.
RegimeLevels conditional_levels(const Density1D& d, double c);

/// E[X^2] - split_score(d, c): the error left after fitting the best levels at threshold c.
double reduced_objective(const Density1D& d, double c);
/// Per-unit-mass squared error of the best two levels split at c (one level when a side is empty).
double reduced_objective(const EmpiricalDist& e, double c);

/// Mean residual life E[X - t | X > t] minus mean inactivity time E[t - X | X <= t].
///
/// Both terms are translation invariant, so this equals the gap of the centred law
/// at t - mean. It has the sign of the derivative of split_score and vanishes exactly
/// at its critical points; for log-concave laws it is strictly decreasing.
/// Throws DegenerateRegime where one side has no mass.
double residual_gap(const Density1D& d, double t);

struct LogconcaveOptions {
    bool skip_probe = false;  ///< trust the caller that V is convex
    int probe_points = 201;
    double threshold_tol = 1e-10;
};

/// Unique optimal threshold of a log-concave law: bisection on residual_gap,
/// bracketed by doubling one-standard-deviation steps away from the mean.
///
/// Throws NotLogConcave when the probe rejects the law, BracketFailure when no sign
/// change appears between the 1e-12 and 1 - 1e-12 quantiles.
SplitResult solve_logconcave(const Density1D& d, const LogconcaveOptions& opts = {});

/// Grid scan of split_score between the 1e-9 and 1 - 1e-9 quantiles; every interior
/// local maximum is refined by golden-section search (then polished on residual_gap)
/// and all maximizers within a relative tie_tol of the best are returned.
SplitResult solve_global(const Density1D& d, int grid_n = 512, double tie_tol = 1e-9);

/// Exact optimum over an atom list via prefix sums. Thresholds are the midpoints of
/// the optimal gaps; tied gaps (relative tie_tol) are all reported.
/// Throws DomainError for fewer than two distinct atoms.
SplitResult solve_empirical(const EmpiricalDist& e, double tie_tol = 1e-12);

enum class BoundaryKind { halfline_left, halfline_right, empty, all };

std::string to_string(BoundaryKind k);

struct BoundaryReport {
    BoundaryKind kind = BoundaryKind::empty;
    /// Endpoint of the half-line in x coordinates.
    std::optional<double> boundary;
};

/// The optimal regime set {x : G(x - alpha) <= G(x - beta)} for a convex loss G,
/// restricted to `search`. Convexity makes G(x - alpha) - G(x - beta) monotone in x,
/// so the set is a half-line located by bisection.
/// Throws DomainError if alpha == beta (every set is then optimal).
BoundaryReport regime_boundary_convex_1d(const std::function<double(double)>& G, double alpha, double beta,
                                         SupportInterval search);

struct SweepRow {
    double t;
    double fx;
    std::optional<double> mk_gap;
    double cdf;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

/// split_score, residual_gap (where defined) and cdf on n evenly spaced points of [t_lo, t_hi].
SweepTable sweep(const Density1D& d, double t_lo, double t_hi, int n);

}  // namespace regimesplit
