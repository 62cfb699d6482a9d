#include "regimesplit/splitcore.hpp"

#include "regimesplit/errors.hpp"
#include "regimesplit/parallel.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regimesplit {

namespace {

struct SideMoments {
    double p_lo;
    double p_hi;
    double m_lo;
    double m_hi;
};

bool degenerate(const Density1D& d, double p_lo, double p_hi) {
    const double tol = d.quadrature().abs_tol;
    return p_lo <= tol || p_hi <= tol;
}

SideMoments side_moments(const Density1D& d, double t) {
    return {tail_mass(d, t, Side::lower), tail_mass(d, t, Side::upper), partial_mean(d, t, Side::lower),
            partial_mean(d, t, Side::upper)};
}

SplitResult finish(const Density1D& d, std::vector<double> thresholds, SplitMethod method) {
    SplitResult r;
    r.thresholds = std::move(thresholds);
    r.method = method;
    const double c = r.thresholds.front();
    const RegimeLevels lv = conditional_levels(d, c);
    r.alpha = lv.alpha;
    r.beta = lv.beta;
    r.fx_value = split_score(d, c);
    r.objective = reduced_objective(d, c);
    return r;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

// Root of a decreasing sign change of residual_gap inside [a, b], if there is one.
std::optional<double> polish_on_gap(const Density1D& d, double a, double b) {
    try {
        const double ga = residual_gap(d, a);
        const double gb = residual_gap(d, b);
        if (!(ga > 0.0 && gb < 0.0)) return std::nullopt;
        auto gap = [&d](double t) { return residual_gap(d, t); };
        auto done = [](double x, double y) { return std::abs(y - x) <= 1e-13 * std::max(1.0, std::abs(x)); };
        const auto [lo, hi] = boost::math::tools::bisect(gap, a, b, done);
        return 0.5 * (lo + hi);
    } catch (const DegenerateRegime&) {
        return std::nullopt;
    }
}

}  // namespace

std::string to_string(SplitMethod m) {
    switch (m) {
        case SplitMethod::logconcave_bisection: return "logconcave_bisection";
        case SplitMethod::global_grid: return "global_grid";
        case SplitMethod::empirical_exact: return "empirical_exact";
    }
    return "unknown";
}

std::string to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::halfline_left: return "halfline_left";
        case BoundaryKind::halfline_right: return "halfline_right";
        case BoundaryKind::empty: return "empty";
        case BoundaryKind::all: return "all";
    }
    return "unknown";
}

double split_score(const Density1D& d, double t) {
    const SideMoments s = side_moments(d, t);
    if (degenerate(d, s.p_lo, s.p_hi)) return d.mean() * d.mean();
    return s.m_lo * s.m_lo / s.p_lo + s.m_hi * s.m_hi / s.p_hi;
}

RegimeLevels conditional_levels(const Density1D& d, double c) {
    const SideMoments s = side_moments(d, c);
    if (degenerate(d, s.p_lo, s.p_hi)) throw DegenerateRegime("threshold leaves one regime without mass");
    return {s.m_lo / s.p_lo, s.m_hi / s.p_hi};
}

double reduced_objective(const Density1D& d, double c) { return std::max(0.0, d.second_moment() - split_score(d, c)); }

double reduced_objective(const EmpiricalDist& e, double c) {
    const double mean = e.mean();
    double w_lo = 0.0, s_lo = 0.0, w_hi = 0.0, s_hi = 0.0, ss = 0.0;
    for (const auto& a : e.atoms()) {
        const double y = a.value - mean;
        ss += a.weight * y * y;
        if (a.value <= c) {
            w_lo += a.weight;
            s_lo += a.weight * y;
        } else {
            w_hi += a.weight;
            s_hi += a.weight * y;
        }
    }
    double between = 0.0;
    if (w_lo > 0.0) between += s_lo * s_lo / w_lo;
    if (w_hi > 0.0) between += s_hi * s_hi / w_hi;
    return std::max(0.0, ss - between) / e.total_weight();
}

double residual_gap(const Density1D& d, double t) {
    const double p_lo = tail_mass(d, t, Side::lower);
    const double p_hi = tail_mass(d, t, Side::upper);
    if (degenerate(d, p_lo, p_hi)) throw DegenerateRegime("residual gap undefined where one side has no mass");
    const SupportInterval r = d.effective_range();
    const double above = d.expect([t](double x) { return x - t; }, t, r.hi);
    const double below = d.expect([t](double x) { return t - x; }, r.lo, t);
    return above / p_hi - below / p_lo;
}

SplitResult solve_logconcave(const Density1D& d, const LogconcaveOptions& opts) {
    if (!opts.skip_probe) {
        const LogConcavityReport probe = logconcavity_probe(d, opts.probe_points);
        if (!probe.is_plausibly_logconcave)
            throw NotLogConcave("V fails the convexity probe (worst second difference " +
                                std::to_string(probe.worst_violation) + ")");
    }
    const double mu = d.mean();
    const double sd = d.stddev();
    const double lo_cap = quantile(d, 1e-12);
    const double hi_cap = quantile(d, 1.0 - 1e-12);
    auto gap = [&d](double t) { return residual_gap(d, t); };

    const double g0 = gap(mu);
    if (g0 == 0.0) return finish(d, {mu}, SplitMethod::logconcave_bisection);

    // Walk away from the mean in the direction of increasing score until the gap flips.
    const int dir = g0 > 0.0 ? +1 : -1;
    double inner = mu;
    double outer = mu;
    double step = sd;
    for (;;) {
        outer = dir > 0 ? std::min(mu + step, hi_cap) : std::max(mu - step, lo_cap);
        const double g = gap(outer);
        if (g == 0.0) return finish(d, {outer}, SplitMethod::logconcave_bisection);
        if ((g > 0.0) != (g0 > 0.0)) break;
        if (outer == hi_cap || outer == lo_cap)
            throw BracketFailure("residual gap keeps its sign up to the 1e-12 quantile");
        inner = outer;
        step *= 2.0;
    }
    const double tol = opts.threshold_tol;
    auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto [a, b] = boost::math::tools::bisect(gap, std::min(inner, outer), std::max(inner, outer), done);
    return finish(d, {0.5 * (a + b)}, SplitMethod::logconcave_bisection);
}

SplitResult solve_global(const Density1D& d, int grid_n, double tie_tol) {
    if (grid_n < 64) throw DomainError("solve_global: grid_n must be at least 64");
    const double lo = quantile(d, 1e-9);
    const double hi = quantile(d, 1.0 - 1e-9);
    const auto n = static_cast<std::size_t>(grid_n);
    std::vector<double> t(n), f(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    parallel_for(n, [&](std::size_t i) { f[i] = split_score(d, t[i]); });

    auto score = [&d](double x) { return split_score(d, x); };
    struct Candidate {
        double t;
        double f;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(f[i] >= f[i - 1] && f[i] >= f[i + 1])) continue;
        double best = golden_section_max(score, t[i - 1], t[i + 1], 1e-10);
        double best_f = score(best);
        if (auto root = polish_on_gap(d, t[i - 1], t[i + 1])) {
            const double fr = score(*root);
            if (fr >= best_f - 1e-14 * std::abs(best_f)) {
                best = *root;
                best_f = fr;
            }
        }
        cands.push_back({best, best_f});
    }
    if (cands.empty()) {
        const auto i = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
        cands.push_back({t[i], f[i]});
    }

    double top = -kInf;
    for (const auto& c : cands) top = std::max(top, c.f);
    std::vector<Candidate> keep;
    for (const auto& c : cands)
        if (c.f >= top - tie_tol * std::abs(top)) keep.push_back(c);
    std::sort(keep.begin(), keep.end(), [](const Candidate& x, const Candidate& y) { return x.t < y.t; });

    std::vector<double> thresholds;
    std::vector<double> values;
    for (const auto& c : keep) {
        if (!thresholds.empty() && c.t - thresholds.back() < 1e-7) {
            if (c.f > values.back()) {
                thresholds.back() = c.t;
                values.back() = c.f;
            }
            continue;
        }
        thresholds.push_back(c.t);
        values.push_back(c.f);
    }
    return finish(d, std::move(thresholds), SplitMethod::global_grid);
}

SplitResult solve_empirical(const EmpiricalDist& e, double tie_tol) {
    const auto& atoms = e.atoms();
    if (atoms.size() < 2) throw DomainError("solve_empirical: need at least two distinct atoms");
    const double w = e.total_weight();
    const double mean = e.mean();

    // Centred prefix sums: the right-hand sum is minus the left-hand one.
    double ss = 0.0;
    for (const auto& a : atoms) ss += a.weight * (a.value - mean) * (a.value - mean);
    std::vector<double> score(atoms.size() - 1);
    std::vector<double> w_left(atoms.size() - 1), s_left(atoms.size() - 1);
    double wl = 0.0, sl = 0.0;
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
        wl += atoms[k].weight;
        sl += atoms[k].weight * (atoms[k].value - mean);
        w_left[k] = wl;
        s_left[k] = sl;
        score[k] = sl * sl / wl + sl * sl / (w - wl);
    }
    const double best = *std::max_element(score.begin(), score.end());

    SplitResult r;
    r.method = SplitMethod::empirical_exact;
    std::size_t first = score.size();
    for (std::size_t k = 0; k < score.size(); ++k) {
        if (score[k] < best - tie_tol * std::abs(best)) continue;
        if (first == score.size()) first = k;
        r.thresholds.push_back(0.5 * (atoms[k].value + atoms[k + 1].value));
    }
    r.alpha = mean + s_left[first] / w_left[first];
    r.beta = mean - s_left[first] / (w - w_left[first]);
    r.objective = std::max(0.0, ss - score[first]) / w;
    r.fx_value = score[first] / w + mean * mean;
    return r;
}

BoundaryReport regime_boundary_convex_1d(const std::function<double(double)>& G, double alpha, double beta,
                                         SupportInterval search) {
    if (alpha == beta) throw DomainError("alpha == beta: every regime set is optimal");
    if (!std::isfinite(search.lo) || !std::isfinite(search.hi) || !(search.lo < search.hi))
        throw DomainError("search interval must be finite with lo < hi");
    // h is nondecreasing in x when alpha < beta and nonincreasing otherwise.
    auto h = [&](double x) { return G(x - alpha) - G(x - beta); };
    const bool left = alpha < beta;
    const bool in_lo = h(search.lo) <= 0.0;
    const bool in_hi = h(search.hi) <= 0.0;
    if (in_lo && in_hi) return {BoundaryKind::all, std::nullopt};
    if (!in_lo && !in_hi) return {BoundaryKind::empty, std::nullopt};

    // Member and non-member ends; shrink to the boundary.
    double member = left ? search.lo : search.hi;
    double outside = left ? search.hi : search.lo;
    if ((left && !in_lo) || (!left && !in_hi)) return {BoundaryKind::empty, std::nullopt};
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (member + outside);
        if (mid == member || mid == outside) break;
        if (std::abs(outside - member) <= 1e-14 * std::max(1.0, std::abs(mid))) break;
        (h(mid) <= 0.0 ? member : outside) = mid;
    }
    return {left ? BoundaryKind::halfline_left : BoundaryKind::halfline_right, 0.5 * (member + outside)};
}

SweepTable sweep(const Density1D& d, double t_lo, double t_hi, int n) {
    if (n < 2) throw DomainError("sweep: need at least 2 points");
    if (!(t_lo < t_hi)) throw DomainError("sweep: need t_lo < t_hi");
    SweepTable table;
    table.rows.resize(static_cast<std::size_t>(n));
    parallel_for(table.rows.size(), [&](std::size_t i) {
        const double t = i + 1 == table.rows.size() ? t_hi : t_lo + (t_hi - t_lo) * static_cast<double>(i) / (n - 1);
        SweepRow row{t, split_score(d, t), std::nullopt, cdf(d, t)};
        try {
            row.mk_gap = residual_gap(d, t);
        } catch (const DegenerateRegime&) {
        }
        table.rows[i] = row;
    });
    return table;
}

}  // namespace regimesplit
