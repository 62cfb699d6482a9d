#include "regimesplit/density.hpp"

#include "regimesplit/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace regimesplit {

namespace {

void require_normalized(const Density1D& d) {
    if (!d.is_normalized()) throw DomainError("density is not normalized");
}

double pick_anchor(const SupportInterval& s, const DensityHints& h) {
    if (h.center > s.lo && h.center < s.hi) return h.center;
    const bool lo_finite = std::isfinite(s.lo);
    const bool hi_finite = std::isfinite(s.hi);
    if (lo_finite && hi_finite) return 0.5 * (s.lo + s.hi);
    if (lo_finite) return s.lo + h.scale;
    if (hi_finite) return s.hi - h.scale;
    return 0.0;
}

}  // namespace

Density1D::Density1D(Potential neg_log_density, SupportInterval support, QuadratureConfig quad, DensityHints hints)
    : potential_(std::move(neg_log_density)), support_(support), quad_(quad), hints_(std::move(hints)) {
    if (!potential_) throw DomainError("density needs a potential function");
    if (std::isnan(support_.lo) || std::isnan(support_.hi) || !(support_.lo < support_.hi))
        throw DomainError("support interval must satisfy lo < hi");
    if (!(hints_.scale > 0.0) || !std::isfinite(hints_.scale)) throw DomainError("scale hint must be positive");
    quad_.validate();
    std::sort(hints_.breakpoints.begin(), hints_.breakpoints.end());
    effective_ = support_;
}

double Density1D::neg_log_density(double x) const {
    if (!support_.contains(x)) return kInf;
    return potential_(x);
}

double Density1D::pdf(double x) const {
    require_normalized(*this);
    if (!support_.contains(x)) return 0.0;
    return std::exp(-(potential_(x) - v_ref_) - log_z_rel_);
}

double Density1D::log_norm() const {
    require_normalized(*this);
    return log_z_rel_ - v_ref_;
}

std::optional<double> Density1D::mean_cache() const {
    if (!normalized_) return std::nullopt;
    return mean_;
}

double Density1D::mean() const {
    require_normalized(*this);
    return mean_;
}

double Density1D::second_moment() const {
    require_normalized(*this);
    return second_moment_;
}

double Density1D::variance() const {
    require_normalized(*this);
    return std::max(0.0, second_moment_ - mean_ * mean_);
}

double Density1D::stddev() const { return std::sqrt(variance()); }

SupportInterval Density1D::effective_range() const {
    require_normalized(*this);
    return effective_;
}

double Density1D::expect(const std::function<double(double)>& h, double a, double b) const {
    require_normalized(*this);
    const double lo = std::max(a, effective_.lo);
    const double hi = std::min(b, effective_.hi);
    if (!(lo < hi)) return 0.0;
    auto integrand = [&](double x) {
        const double p = pdf(x);
        return p == 0.0 ? 0.0 : h(x) * p;
    };
    return integrate(integrand, lo, hi, hints_.breakpoints, quad_).value;
}

Density1D normalize(const Density1D& d) {
    if (d.normalized_) return d;
    Density1D out = d;
    const SupportInterval& s = out.support_;
    const double anchor = pick_anchor(s, out.hints_);
    out.v_ref_ = out.potential_(anchor);
    if (!std::isfinite(out.v_ref_))
        throw DomainError("density must be positive at the centre hint (V(" + std::to_string(anchor) + ") is not finite)");

    auto unnormalized = [&out](double x) {
        if (!out.support_.contains(x)) return 0.0;
        return std::exp(-(out.potential_(x) - out.v_ref_));
    };
    const auto& bps = out.hints_.breakpoints;
    const double scale = out.hints_.scale;
    out.effective_.hi = std::isfinite(s.hi) ? s.hi : tail_cutoff(unnormalized, anchor, +1, scale, s.hi, bps, out.quad_);
    out.effective_.lo = std::isfinite(s.lo) ? s.lo : tail_cutoff(unnormalized, anchor, -1, scale, s.lo, bps, out.quad_);

    const double z = integrate(unnormalized, out.effective_.lo, out.effective_.hi, bps, out.quad_).value;
    if (!std::isfinite(z) || !(z > 0.0)) throw NonIntegrable("exp(-V) has no finite positive integral");
    out.log_z_rel_ = std::log(z);
    out.normalized_ = true;

    out.mean_ = out.expect([](double x) { return x; }, out.effective_.lo, out.effective_.hi);
    // Second moment about the mean, then shifted back, to limit cancellation.
    const double m = out.mean_;
    const double central = out.expect([m](double x) { return (x - m) * (x - m); }, out.effective_.lo, out.effective_.hi);
    out.second_moment_ = central + m * m;
    if (!std::isfinite(out.mean_) || !std::isfinite(out.second_moment_))
        throw NonIntegrable("density has no finite second moment");
    return out;
}

double tail_mass(const Density1D& d, double t, Side side) {
    const SupportInterval r = d.effective_range();
    auto one = [](double) { return 1.0; };
    if (side == Side::lower) {
        if (t <= r.lo) return 0.0;
        return std::clamp(d.expect(one, r.lo, t), 0.0, 1.0);
    }
    if (t >= r.hi) return 0.0;
    return std::clamp(d.expect(one, t, r.hi), 0.0, 1.0);
}

double cdf(const Density1D& d, double t) { return tail_mass(d, t, Side::lower); }

double partial_mean(const Density1D& d, double t, Side side) {
    const SupportInterval r = d.effective_range();
    auto ident = [](double x) { return x; };
    if (side == Side::lower) return t <= r.lo ? 0.0 : d.expect(ident, r.lo, t);
    return t >= r.hi ? 0.0 : d.expect(ident, t, r.hi);
}

double quantile(const Density1D& d, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
    const SupportInterval r = d.effective_range();
    std::function<double(double)> f;
    if (p <= 0.5)
        f = [&](double x) { return tail_mass(d, x, Side::lower) - p; };
    else
        f = [&](double x) { return (1.0 - p) - tail_mass(d, x, Side::upper); };
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto [a, b] = boost::math::tools::toms748_solve(f, r.lo, r.hi, f(r.lo), f(r.hi), tol, max_iter);
    return 0.5 * (a + b);
}

Density1D affine(const Density1D& d, double scale, double shift) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
        throw DomainError("affine: scale must be positive and finite");
    auto base = d;
    Density1D::Potential v = [base, scale, shift](double y) { return base.neg_log_density((y - shift) / scale); };
    SupportInterval s{d.support().lo * scale + shift, d.support().hi * scale + shift};
    DensityHints h = d.hints();
    h.center = h.center * scale + shift;
    h.scale *= scale;
    for (double& x : h.breakpoints) x = x * scale + shift;
    return normalize(Density1D(std::move(v), s, d.quadrature(), std::move(h)));
}

std::string family_name(const FamilySpec& spec) {
    static const char* names[] = {"gaussian", "laplace", "uniform", "weibull", "piecewise"};
    return names[spec.index()];
}

namespace {

bool finite(double x) { return std::isfinite(x); }

Density1D build(const GaussianSpec& g, const QuadratureConfig& q) {
    if (!finite(g.mu) || !(g.sigma > 0.0) || !finite(g.sigma)) throw DomainError("gaussian: need finite mu and sigma > 0");
    const double mu = g.mu;
    const double two_var = 2.0 * g.sigma * g.sigma;
    return Density1D([=](double x) { return (x - mu) * (x - mu) / two_var; }, {}, q, {mu, g.sigma, {}});
}

Density1D build(const LaplaceSpec& l, const QuadratureConfig& q) {
    if (!finite(l.mu) || !(l.b > 0.0) || !finite(l.b)) throw DomainError("laplace: need finite mu and b > 0");
    const double mu = l.mu;
    const double b = l.b;
    return Density1D([=](double x) { return std::abs(x - mu) / b; }, {}, q, {mu, b, {mu}});
}

Density1D build(const UniformSpec& u, const QuadratureConfig& q) {
    if (!finite(u.a) || !finite(u.b) || !(u.b > u.a)) throw DomainError("uniform: need finite a < b");
    return Density1D([](double) { return 0.0; }, {u.a, u.b}, q, {0.5 * (u.a + u.b), u.b - u.a, {}});
}

Density1D build(const WeibullSpec& w, const QuadratureConfig& q) {
    if (!(w.k > 0.0) || !finite(w.k)) throw DomainError("weibull: need k > 0");
    const double k = w.k;
    Density1D::Potential v = [k](double x) {
        if (k == 1.0) return x;
        if (x == 0.0) return k > 1.0 ? kInf : -kInf;
        return std::pow(x, k) - (k - 1.0) * std::log(x);
    };
    return Density1D(std::move(v), {0.0, kInf}, q, {std::pow(std::log(2.0), 1.0 / k), 1.0, {}});
}

Density1D build(const PiecewiseConstSpec& p, const QuadratureConfig& q) {
    const auto& br = p.breaks;
    const auto& val = p.values;
    if (br.size() < 2 || val.size() + 1 != br.size())
        throw DomainError("piecewise: need n+1 breakpoints for n values");
    for (std::size_t i = 0; i < br.size(); ++i) {
        if (!finite(br[i])) throw DomainError("piecewise: breakpoints must be finite");
        if (i > 0 && !(br[i] > br[i - 1])) throw DomainError("piecewise: breakpoints must be strictly increasing");
    }
    double mass = 0.0;
    std::size_t heaviest = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        if (!finite(val[i]) || val[i] < 0.0) throw DomainError("piecewise: values must be finite and nonnegative");
        const double piece = val[i] * (br[i + 1] - br[i]);
        if (piece > val[heaviest] * (br[heaviest + 1] - br[heaviest])) heaviest = i;
        mass += piece;
    }
    if (!(mass > 0.0)) throw DomainError("piecewise: total mass must be positive");

    Density1D::Potential v = [br, val](double x) {
        auto it = std::upper_bound(br.begin(), br.end(), x);
        std::size_t i = static_cast<std::size_t>(it - br.begin());
        i = std::clamp<std::size_t>(i, 1, val.size()) - 1;
        return val[i] > 0.0 ? -std::log(val[i]) : kInf;
    };
    const double centre = 0.5 * (br[heaviest] + br[heaviest + 1]);
    return Density1D(std::move(v), {br.front(), br.back()}, q, {centre, br.back() - br.front(), br});
}

}  // namespace

Density1D make_family(const FamilySpec& spec, QuadratureConfig quad) {
    return normalize(std::visit([&](const auto& s) { return build(s, quad); }, spec));
}

LogConcavityReport logconcavity_probe(const Density1D& d, int n_points) {
    if (n_points < 3) throw DomainError("logconcavity_probe: need at least 3 points");
    const double eps = d.quadrature().tail_mass_eps;
    const double lo = quantile(d, eps);
    const double hi = quantile(d, 1.0 - eps);
    std::vector<double> v(static_cast<std::size_t>(n_points));
    double v_scale = 1.0;
    for (int i = 0; i < n_points; ++i) {
        const double x = lo + (hi - lo) * i / (n_points - 1);
        v[static_cast<std::size_t>(i)] = d.neg_log_density(x);
        if (std::isfinite(v[static_cast<std::size_t>(i)])) v_scale = std::max(v_scale, std::abs(v[static_cast<std::size_t>(i)]));
    }
    LogConcavityReport report;
    report.worst_violation = kInf;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double d2 = v[i - 1] - 2.0 * v[i] + v[i + 1];
        // An infinite V strictly inside the grid (a hole in the support) breaks concavity of log p.
        const double second = std::isnan(d2) ? -kInf : d2;
        report.worst_violation = std::min(report.worst_violation, second);
    }
    report.is_plausibly_logconcave = report.worst_violation >= -1e-9 * v_scale;
    return report;
}

double weibull_mean_median_k() {
    auto gap = [](double k) { return std::tgamma(1.0 + 1.0 / k) - std::pow(std::log(2.0), 1.0 / k); };
    auto done = [](double a, double b) { return std::abs(b - a) < 1e-9; };
    const auto [a, b] = boost::math::tools::bisect(gap, 1.0, 20.0, done);
    return 0.5 * (a + b);
}

EmpiricalDist::EmpiricalDist(std::vector<Atom> atoms) {
    for (const Atom& a : atoms)
        if (!std::isfinite(a.value) || !std::isfinite(a.weight) || !(a.weight > 0.0))
            throw DomainError("empirical atoms need finite values and positive weights");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
    for (const Atom& a : atoms) {
        if (!atoms_.empty() && atoms_.back().value == a.value)
            atoms_.back().weight += a.weight;
        else
            atoms_.push_back(a);
        total_weight_ += a.weight;
    }
    if (atoms_.empty()) throw DomainError("empirical distribution needs at least one atom");
}

EmpiricalDist EmpiricalDist::from_samples(const std::vector<double>& samples) {
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    for (double x : samples) atoms.push_back({x, 1.0});
    return EmpiricalDist(std::move(atoms));
}

double EmpiricalDist::mean() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight * a.value;
    return s / total_weight_;
}

}  // namespace regimesplit
