#include "regimesplit/inequality.hpp"

#include "regimesplit/errors.hpp"
#include "regimesplit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regimesplit {

namespace {

constexpr double kMinFinalSlope = 1e-6;

// (1 - exp(-x)) / x, the mean of exp(-x v) over v in [0, 1].
double mean_exp(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x / 2.0;
    return -std::expm1(-x) / x;
}

// (1 - exp(-x) (1 + x)) / x^2, the integral of v exp(-x v) over v in [0, 1].
double mean_lin_exp(double x) {
    if (std::abs(x) < 0.1) {
        // sum_n (-x)^n / (n! (n + 2))
        double term = 1.0;
        double sum = 0.5;
        for (int n = 1; n < 20; ++n) {
            term *= -x / n;
            sum += term / (n + 2);
        }
        return sum;
    }
    return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

struct Integrals {
    double mass;   // integral of exp(-(V - V(0)))
    double first;  // integral of y exp(-(V - V(0)))
};

Integrals piecewise_integrals(const std::vector<double>& knots, const std::vector<double>& slopes) {
    Integrals out{0.0, 0.0};
    double rel = 0.0;  // V(knot) - V(0)
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const double a = knots[i];
        const double s = slopes[i];
        const double w = std::exp(-rel);
        if (i + 1 == knots.size()) {
            out.mass += w / s;
            out.first += w * (a / s + 1.0 / (s * s));
        } else {
            const double len = knots[i + 1] - a;
            const double seg_mass = w * len * mean_exp(s * len);
            out.mass += seg_mass;
            out.first += a * seg_mass + w * len * len * mean_lin_exp(s * len);
            rel += s * len;
        }
    }
    return out;
}

}  // namespace

ConvexPotential ConvexPotential::piecewise_linear(std::vector<double> knots, std::vector<double> slopes, double v0) {
    if (knots.empty() || knots.size() != slopes.size())
        throw DomainError("piecewise potential needs as many slopes as knots");
    if (knots.front() != 0.0) throw DomainError("piecewise potential knots must start at 0");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i]) || !std::isfinite(slopes[i]))
            throw DomainError("piecewise potential knots and slopes must be finite");
        if (i > 0 && !(knots[i] > knots[i - 1])) throw DomainError("piecewise potential knots must increase");
        if (i > 0 && slopes[i] < slopes[i - 1]) throw DomainError("piecewise potential slopes must not decrease");
    }
    if (!std::isfinite(v0)) throw DomainError("piecewise potential needs a finite V(0)");
    if (!(slopes.back() > kMinFinalSlope))
        throw NonIntegrable("final slope " + std::to_string(slopes.back()) + " leaves exp(-V) non-integrable");
    ConvexPotential p;
    p.knots_ = std::move(knots);
    p.slopes_ = std::move(slopes);
    p.v0_ = v0;
    return p;
}

ConvexPotential ConvexPotential::from_function(std::function<double(double)> v, double domain_end, DensityHints hints,
                                               QuadratureConfig quad) {
    if (!v) throw DomainError("potential function is empty");
    if (!(domain_end > 0.0)) throw DomainError("potential domain must extend right of 0");
    if (!(hints.scale > 0.0) || !std::isfinite(hints.scale)) throw DomainError("scale hint must be positive");
    quad.validate();
    ConvexPotential p;
    p.fn_ = std::move(v);
    p.domain_end_ = domain_end;
    p.hints_ = std::move(hints);
    p.quad_ = quad;
    return p;
}

double ConvexPotential::operator()(double y) const {
    if (y < 0.0 || y > domain_end_) return kInf;
    if (fn_) return fn_(y);
    double v = v0_;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const double end = i + 1 < knots_.size() ? knots_[i + 1] : kInf;
        v += slopes_[i] * (std::min(y, end) - knots_[i]);
        if (y <= end) break;
    }
    return v;
}

LemmaSides lemma_sides(const ConvexPotential& v) {
    const double v0 = v(0.0);
    if (!std::isfinite(v0)) throw DomainError("V(0) must be finite");
    Integrals ints{};
    if (v.is_piecewise_linear()) {
        ints = piecewise_integrals(v.knots(), v.slopes());
    } else {
        const auto& bps = v.hints().breakpoints;
        const auto& quad = v.quadrature();
        auto weight = [&v, v0](double y) {
            const double e = std::exp(-(v(y) - v0));
            if (std::isnan(e)) throw NonIntegrable("potential is NaN at " + std::to_string(y));
            return e;
        };
        // Cut where the first-moment integrand has settled; that also covers the mass.
        auto weighted = [&weight](double y) { return (1.0 + y) * weight(y); };
        const double end = std::isfinite(v.domain_end())
                               ? v.domain_end()
                               : tail_cutoff(weighted, 0.0, +1, v.hints().scale, kInf, bps, quad);
        ints.mass = integrate(weight, 0.0, end, bps, quad).value;
        ints.first = integrate([&weight](double y) { return y * weight(y); }, 0.0, end, bps, quad).value;
    }
    const double scale = std::exp(-2.0 * v0);
    LemmaSides s{scale * ints.first, scale * ints.mass * ints.mass};
    if (!std::isfinite(s.lhs) || !std::isfinite(s.rhs)) throw NonIntegrable("lemma integrals overflow");
    return s;
}

LemmaCheck check_lemma(const ConvexPotential& v, double tol) {
    const LemmaSides s = lemma_sides(v);
    const double slack = s.rhs - s.lhs;
    return {s.lhs <= s.rhs + tol, s.lhs, s.rhs, slack};
}

ConvexPotential translated_potential(const Density1D& d, double t) {
    const SupportInterval& sup = d.support();
    if (!(t >= sup.lo && t < sup.hi)) throw DomainError("translation point must lie inside the support");
    const double vt = d.neg_log_density(t);
    if (!std::isfinite(vt)) throw DomainError("potential is infinite at the translation point");
    DensityHints hints;
    hints.scale = d.hints().scale;
    for (double b : d.hints().breakpoints)
        if (b > t) hints.breakpoints.push_back(b - t);
    return ConvexPotential::from_function([d, t, vt](double u) { return d.neg_log_density(t + u) - vt; }, sup.hi - t,
                                          std::move(hints), d.quadrature());
}

double residual_life(const Density1D& d, double t) {
    const double p = tail_mass(d, t, Side::upper);
    if (p <= d.quadrature().abs_tol) throw DegenerateRegime("no mass above t = " + std::to_string(t));
    return partial_mean(d, t, Side::upper) / p - t;
}

double inactivity_time(const Density1D& d, double t) {
    const double p = tail_mass(d, t, Side::lower);
    if (p <= d.quadrature().abs_tol) throw DegenerateRegime("no mass below t = " + std::to_string(t));
    return t - partial_mean(d, t, Side::lower) / p;
}

MonotonicityReport monotonicity_probe(const Density1D& d, int n, double slack) {
    if (n < 3) throw DomainError("monotonicity_probe needs n >= 3");
    MonotonicityReport r;
    const auto un = static_cast<std::size_t>(n);
    r.grid.resize(un);
    r.residual.resize(un);
    r.inactivity.resize(un);
    parallel_for(un, [&](std::size_t i) {
        const double t = quantile(d, static_cast<double>(i + 1) / (n + 1));
        r.grid[i] = t;
        r.residual[i] = residual_life(d, t);
        r.inactivity[i] = inactivity_time(d, t);
    });
    for (std::size_t i = 1; i < un; ++i) {
        const double rise = r.residual[i] - r.residual[i - 1];
        const double drop = r.inactivity[i - 1] - r.inactivity[i];
        if (rise > slack) ++r.m_violations;
        if (drop > slack) ++r.k_violations;
        r.worst = std::max({r.worst, rise > slack ? rise : 0.0, drop > slack ? drop : 0.0});
    }
    return r;
}

ConvexPotential random_convex_potential(std::mt19937_64& rng, const RandomPotentialOptions& opts) {
    if (!(opts.span > 0.0)) throw DomainError("knot span must be positive");
    if (!(opts.min_final_slope > kMinFinalSlope)) throw DomainError("min_final_slope must exceed 1e-6");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> exp1(1.0);

    std::vector<double> knots{0.0};
    if (opts.n_knots) {
        if (*opts.n_knots < 1) throw DomainError("n_knots must be at least 1");
        // Given its count, a Poisson process places points as uniform order statistics.
        for (int i = 1; i < *opts.n_knots; ++i) knots.push_back(opts.span * unit(rng));
        std::sort(knots.begin(), knots.end());
        knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    } else {
        for (double x = exp1(rng); x < opts.span; x += exp1(rng)) knots.push_back(x);
    }

    std::vector<double> slopes;
    double s = -1.0 + 2.0 * unit(rng);
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0) s += exp1(rng);
        slopes.push_back(s);
    }
    slopes.back() = std::max(slopes.back(), opts.min_final_slope);
    const double v0 = -1.0 + 2.0 * unit(rng);
    return ConvexPotential::piecewise_linear(std::move(knots), std::move(slopes), v0);
}

}  // namespace regimesplit
