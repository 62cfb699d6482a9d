#pragma once

#include "regimesplit/quadrature.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace regimesplit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SupportInterval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Which side of a threshold t an expectation is restricted to: {X <= t} or {X > t}.
enum class Side { lower, upper };

/// Placement hints used to locate the bulk of the mass when truncating infinite tails.
struct DensityHints {
    double center = 0.0;  ///< a point where the density is positive
    double scale = 1.0;   ///< rough spread; first tail step
    std::vector<double> breakpoints;  ///< kinks/jumps of V, used to split quadrature panels
};

/// A one-dimensional law with density proportional to exp(-V(x)) on a support interval.
///
/// A freshly constructed density is unnormalized. normalize() fixes the normalizing
/// constant, truncates infinite tails to an effective range and caches the first two
/// moments; all probabilistic queries require a normalized density. Instances are
/// immutable after normalization and may be shared across threads.
class Density1D {
public:
    using Potential = std::function<double(double)>;

    Density1D(Potential neg_log_density, SupportInterval support, QuadratureConfig quad = {},
              DensityHints hints = {});

    /// V(x); +infinity outside the support.
    double neg_log_density(double x) const;
    /// exp(-V(x) - log_norm). Requires a normalized density.
    double pdf(double x) const;

    const SupportInterval& support() const { return support_; }
    const QuadratureConfig& quadrature() const { return quad_; }
    const DensityHints& hints() const { return hints_; }

    bool is_normalized() const { return normalized_; }
    /// log of the integral of exp(-V).
    double log_norm() const;
    std::optional<double> mean_cache() const;
    double mean() const;
    double second_moment() const;
    double variance() const;
    double stddev() const;
    /// Integration range after dropping tails of mass below tail_mass_eps.
    SupportInterval effective_range() const;

    /// Integral of h(x) pdf(x) over [a, b] intersected with the effective range.
    double expect(const std::function<double(double)>& h, double a, double b) const;

private:
    friend Density1D normalize(const Density1D& d);

    Potential potential_;
    SupportInterval support_;
    QuadratureConfig quad_;
    DensityHints hints_;

    bool normalized_ = false;
    double v_ref_ = 0.0;
    double log_z_rel_ = 0.0;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
    SupportInterval effective_;
};

/// Returns a copy with the normalizing constant and moments fixed. Idempotent.
/// Throws NonIntegrable if exp(-V) (or x^2 exp(-V)) cannot be integrated.
Density1D normalize(const Density1D& d);

/// P(X <= t), clamped to [0, 1].
double cdf(const Density1D& d, double t);
/// P(X <= t) for Side::lower, P(X > t) for Side::upper; each side integrated directly.
double tail_mass(const Density1D& d, double t, Side side);
/// E[X, X <= t] or E[X, X > t].
double partial_mean(const Density1D& d, double t, Side side);
/// Inverse cdf. Throws DomainError unless 0 < p < 1.
double quantile(const Density1D& d, double p);

/// Law of scale * X + shift (scale > 0), normalized.
Density1D affine(const Density1D& d, double scale, double shift);

// Built-in families.
struct GaussianSpec {
    double mu = 0.0;
    double sigma = 1.0;
};
struct LaplaceSpec {
    double mu = 0.0;
    double b = 1.0;
};
struct UniformSpec {
    double a = 0.0;
    double b = 1.0;
};
/// Standard Weibull: survival exp(-x^k) on [0, inf).
struct WeibullSpec {
    double k = 1.0;
};
/// Density proportional to values[i] on [breaks[i], breaks[i+1]).
struct PiecewiseConstSpec {
    std::vector<double> breaks;
    std::vector<double> values;
};

using FamilySpec = std::variant<GaussianSpec, LaplaceSpec, UniformSpec, WeibullSpec, PiecewiseConstSpec>;

std::string family_name(const FamilySpec& spec);
/// Normalized density for the family. Throws DomainError on invalid parameters.
Density1D make_family(const FamilySpec& spec, QuadratureConfig quad = {});

struct LogConcavityReport {
    bool is_plausibly_logconcave = true;
    /// Most negative second difference of V found on the grid.
    double worst_violation = 0.0;
};

/// Second differences of V on n_points evenly spaced points between the
/// tail_mass_eps and 1 - tail_mass_eps quantiles.
LogConcavityReport logconcavity_probe(const Density1D& d, int n_points = 201);

/// The Weibull shape k at which mean Gamma(1 + 1/k) equals median (ln 2)^(1/k).
double weibull_mean_median_k();

/// A finite weighted point mass law. Atoms are sorted and duplicates merged.
class EmpiricalDist {
public:
    struct Atom {
        double value;
        double weight;
    };

    explicit EmpiricalDist(std::vector<Atom> atoms);
    static EmpiricalDist from_samples(const std::vector<double>& samples);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double total_weight() const { return total_weight_; }
    double mean() const;

private:
    std::vector<Atom> atoms_;
    double total_weight_ = 0.0;
};

}  // namespace regimesplit
