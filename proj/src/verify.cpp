#include "regimesplit/verify.hpp"

#include "regimesplit/errors.hpp"
#include "regimesplit/geometry.hpp"
#include "regimesplit/inequality.hpp"
#include "regimesplit/multidim.hpp"
#include "regimesplit/random.hpp"
#include "regimesplit/splitcore.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>

namespace regimesplit {

namespace {

struct Log {
    std::vector<std::string> lines;
    bool ok = true;

    void expect(bool cond, const std::string& line) {
        lines.push_back(std::string(cond ? "ok    " : "FAIL  ") + line);
        ok = ok && cond;
    }
    void note(const std::string& line) { lines.push_back("      " + line); }
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string err(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

// "label: computed vs expected (|diff| <= tol)"
void expect_close(Log& log, const std::string& label, double got, double want, double tol) {
    const double diff = std::abs(got - want);
    log.expect(diff <= tol, label + ": " + num(got) + " vs " + num(want) + " (|diff| " + err(diff) + ", tol " +
                                err(tol) + ")");
}

constexpr double kPi = std::numbers::pi;

const PiecewiseConstSpec kTwoMaxima{{-2.0, -0.1, 0.1, 2.0}, {1.0 / 8, 21.0 / 8, 1.0 / 8}};

double two_maxima_formula(double t) {
    t = std::abs(t);
    if (t <= 0.1) {
        const double m = -21.0 / 80 + 21.0 / 16 * t * t;
        return m * m / ((0.5 + 21.0 / 8 * t) * (0.5 - 21.0 / 8 * t));
    }
    return (2 - t) * (t + 2) * (t + 2) / (4 * (6 + t));
}

// Largest eigenvalue of a symmetric 3x3 matrix from the trigonometric root formula.
double top_eigenvalue_3x3(const Matrix& a) {
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                      2 * p1;
    const double p = std::sqrt(p2 / 6);
    if (p == 0) return q;
    Matrix b(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
    const double det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(det / 2, -1.0, 1.0);
    return q + 2 * p * std::cos(std::acos(r) / 3);
}

void check_gaussian(Log& log, const VerifyOptions&) {
    for (double mu : {0.0, 3.0})
        for (double sigma : {1.0, 2.0}) {
            const auto r = solve_logconcave(make_family(GaussianSpec{mu, sigma}));
            const double h = sigma * std::sqrt(2 / kPi);
            const std::string tag = "N(" + num(mu) + ", " + num(sigma) + ") ";
            expect_close(log, tag + "threshold", r.thresholds.front(), mu, 1e-8);
            expect_close(log, tag + "alpha", r.alpha, mu - h, 1e-7);
            expect_close(log, tag + "beta", r.beta, mu + h, 1e-7);
        }
}

void check_two_maxima(Log& log, const VerifyOptions&) {
    const auto d = make_family(kTwoMaxima);
    const auto r = solve_global(d);
    const double ts = 2 * std::sqrt(5.0) - 4;
    log.expect(r.thresholds.size() == 2, "number of optimal thresholds: " + std::to_string(r.thresholds.size()) +
                                             " vs 2");
    if (r.thresholds.size() == 2) {
        expect_close(log, "lower threshold", r.thresholds[0], -ts, 1e-6);
        expect_close(log, "upper threshold", r.thresholds[1], ts, 1e-6);
        expect_close(log, "score at lower threshold", r.fx_value, two_maxima_formula(ts), 1e-7);
        expect_close(log, "score at upper threshold", split_score(d, r.thresholds[1]), two_maxima_formula(ts), 1e-7);
    }
    for (double t : {0.0, 0.05, 0.1, 0.5, 1.0, 1.5, -0.3})
        expect_close(log, "score(" + num(t) + ")", split_score(d, t), two_maxima_formula(t), 1e-7);
    const double at_star = split_score(d, ts);
    const double at_cut = split_score(d, 0.1);
    log.expect(at_star > at_cut, "score(t*) = " + num(at_star) + " > score(0.1) = " + num(at_cut));
}

void check_hexagon(Log& log, const VerifyOptions&) {
    const auto r = hexagon_counterexample();
    log.expect(r.area_matches, "area: " + to_string(r.area) + " vs 104");
    log.expect(r.centered, "first moments: (" + to_string(r.moments.x) + ", " + to_string(r.moments.y) + ") vs (0, 0)");
    log.expect(r.r0_matches, "R(0): " + to_string(r.r0) + " vs 22045/12168 (" + num(to_double(r.r0)) + ")");
    log.expect(r.r1_matches, "R(1): " + to_string(r.r1) + " vs 9389/4995 (" + num(to_double(r.r1)) + ")");
    log.expect(r.counterexample_holds, "R(1) > R(0): " + std::string(r.counterexample_holds ? "true" : "false"));
}

void check_lemma(Log& log, const VerifyOptions& opts) {
    const std::size_t n = opts.n.value_or(1000);
    auto rng = substream(opts.seed, 4);
    std::size_t holds = 0;
    double min_slack = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = check_lemma(random_convex_potential(rng), 0.0);
        min_slack = std::min(min_slack, c.slack);
        holds += c.slack >= -1e-9;
    }
    log.expect(holds == n, std::to_string(holds) + "/" + std::to_string(n) +
                               " random convex potentials satisfy the inequality (min slack " + num(min_slack) +
                               ", floor -1e-09)");
    boost::random::uniform_01<double> unit;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double lambda = 0.05 + 5 * unit(rng);
        const double v0 = -3 + 6 * unit(rng);
        const double knot = 10 * unit(rng);
        const auto c = check_lemma(ConvexPotential::piecewise_linear({0.0, knot}, {lambda, lambda}, v0), 0.0);
        worst = std::max(worst, std::abs(c.slack));
    }
    log.expect(worst < 1e-9, "affine potentials: max |slack| " + err(worst) + " (tol 1e-09)");
}

void check_monotonicity(Log& log, const VerifyOptions& opts) {
    const int n = static_cast<int>(opts.n.value_or(100));
    const std::vector<std::pair<std::string, FamilySpec>> fams{{"gaussian(0,1)", GaussianSpec{}},
                                                               {"laplace(0,1)", LaplaceSpec{}},
                                                               {"uniform(0,1)", UniformSpec{0, 1}},
                                                               {"weibull(3.439)", WeibullSpec{3.439}}};
    for (const auto& [name, spec] : fams) {
        const auto r = monotonicity_probe(make_family(spec), n);
        log.expect(r.m_violations == 0 && r.k_violations == 0,
                   name + ": residual-life rises " + std::to_string(r.m_violations) + ", inactivity drops " +
                       std::to_string(r.k_violations) + " on " + std::to_string(n) + " quantiles (slack 1e-08)");
    }
}

void check_weibull(Log& log, const VerifyOptions&) {
    const double k = weibull_mean_median_k();
    log.expect(k >= 3.42 && k <= 3.46, "shape with mean = median: " + num(k) + " in [3.42, 3.46]");
    const auto r = solve_logconcave(make_family(WeibullSpec{k}));
    expect_close(log, "threshold vs mean Gamma(1 + 1/k)", r.thresholds.front(), std::tgamma(1 + 1 / k), 1e-4);
}

void check_elliptical(Log& log, const VerifyOptions& opts) {
    auto rng = substream(opts.seed, 7);
    std::vector<std::pair<std::string, Matrix>> cases{{"diag(4,1)", Matrix::diagonal({4, 1})},
                                                      {"[[2,1],[1,2]]", Matrix::from_rows({{2, 1}, {1, 2}})}};
    for (int i = 0; i < 5; ++i) cases.emplace_back("random SPD 3x3 #" + std::to_string(i + 1), random_spd(rng, 3));
    const double c0_gauss = 1 / std::sqrt(2 * kPi);
    for (const auto& [name, sigma] : cases) {
        const std::size_t d = sigma.rows();
        Vector mu(d);
        for (std::size_t i = 0; i < d; ++i) mu[i] = 0.5 * static_cast<double>(i) - 1;
        const auto model = make_elliptical(mu, sigma);
        const auto r = best_direction(model);
        const double expected_top = d == 2 ? (name == "diag(4,1)" ? 4.0 : 3.0) : top_eigenvalue_3x3(sigma);
        expect_close(log, name + " lambda_max", r.lambda_max, expected_top, 1e-8);
        expect_close(log, name + " Rayleigh at u*", rayleigh(sigma, r.u_star), r.lambda_max, 1e-8);
        expect_close(log, name + " value_at_zero", r.value_at_zero, 4 * c0_gauss * c0_gauss * expected_top, 1e-8);
        expect_close(log, name + " F(u*, 0) - |mu|^2", F_halfspace(model, r.u_star, 0) - dot(mu, mu),
                     r.value_at_zero, 1e-8);
        const auto t = optimal_t_check(model, r.u_star);
        expect_close(log, name + " optimal t", t.t_star, 0.0, 1e-6);
    }
}

void check_montecarlo(Log& log, const VerifyOptions& opts) {
    const std::size_t n = opts.n.value_or(200000);
    auto rng = substream(opts.seed, 8);
    boost::random::normal_distribution<double> normal;
    int f_ok = 0, slope_ok = 0;
    double worst_f = 0, worst_slope = 0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(i) % 3;
        Vector mu(d);
        for (auto& m : mu) m = normal(rng);
        const auto model = make_elliptical(mu, random_spd(rng, d));
        const Vector u = random_unit_vector(rng, d);
        const Vector v = random_unit_vector(rng, d);
        const double t = 0.5 * normal(rng) * std::sqrt(dot(u, model.sigma() * u));
        const std::uint64_t s = splitmix64(opts.seed + 1000 + static_cast<std::uint64_t>(i));
        const auto mc = F_mc(model, u, t, n, s);
        const double exact = F_halfspace(model, u, t);
        const double zf = std::abs(mc.value - exact) / mc.std_error;
        worst_f = std::max(worst_f, zf);
        f_ok += zf < 4;
        const auto reg = regression_slope_mc(model, u, v, n, s ^ 0x5bd1e995ULL);
        const double zs = std::abs(reg.slope - reg.expected) / reg.std_error;
        worst_slope = std::max(worst_slope, zs);
        slope_ok += zs < 4;
        log.note("case " + std::to_string(i + 1) + " (d=" + std::to_string(d) + "): F_mc " + num(mc.value) + " +- " +
                 err(mc.std_error) + " vs " + num(exact) + "; slope " + num(reg.slope) + " vs " + num(reg.expected));
    }
    log.expect(f_ok == 20, "F_mc within 4 SE of F_halfspace: " + std::to_string(f_ok) + "/20 (worst " + num(worst_f) +
                               " SE)");
    log.expect(slope_ok == 20, "regression slope within 4 SE: " + std::to_string(slope_ok) + "/20 (worst " +
                                   num(worst_slope) + " SE)");
}

void check_oracle(Log& log, const VerifyOptions& opts) {
    const std::size_t size = opts.n.value_or(1000);
    struct Fam {
        std::string name;
        FamilySpec spec;
        std::function<double(std::mt19937_64&)> draw;
    };
    boost::random::uniform_01<double> unit;
    boost::random::normal_distribution<double> normal;
    const double weibull_k = 1.5;
    const std::vector<Fam> fams{
        {"gaussian(0,1)", GaussianSpec{}, [&](std::mt19937_64& g) { return normal(g); }},
        {"laplace(0,1)", LaplaceSpec{},
         [&](std::mt19937_64& g) {
             const double e = -std::log1p(-unit(g));
             return unit(g) < 0.5 ? -e : e;
         }},
        {"uniform(0,1)", UniformSpec{0, 1}, [&](std::mt19937_64& g) { return unit(g); }},
        {"weibull(1.5)", WeibullSpec{weibull_k},
         [&](std::mt19937_64& g) { return std::pow(-std::log1p(-unit(g)), 1 / weibull_k); }}};
    std::uint64_t stream = 0;
    for (const auto& f : fams) {
        const double c = solve_logconcave(make_family(f.spec)).thresholds.front();
        double worst_ratio = 0.0, sum_ratio = 0.0;
        int exact_ok = 0, within = 0;
        for (int s = 0; s < 50; ++s) {
            auto g = substream(opts.seed, 9000 + stream++);
            std::vector<double> xs(size);
            for (auto& x : xs) x = f.draw(g);
            const EmpiricalDist e = EmpiricalDist::from_samples(xs);
            const auto best = solve_empirical(e);
            // Exactness: no gap midpoint does better than the reported optimum.
            double brute = kInf;
            const auto& atoms = e.atoms();
            for (std::size_t k = 0; k + 1 < atoms.size(); ++k)
                brute = std::min(brute, reduced_objective(e, 0.5 * (atoms[k].value + atoms[k + 1].value)));
            exact_ok += best.objective <= brute + 1e-12 * std::max(1.0, brute);
            const double ratio = reduced_objective(e, c) / best.objective;
            worst_ratio = std::max(worst_ratio, ratio);
            sum_ratio += ratio;
            within += ratio <= 1.02;
        }
        log.expect(exact_ok == 50, f.name + ": empirical optimum matches enumeration on " + std::to_string(exact_ok) +
                                       "/50 samples");
        log.expect(within == 50, f.name + ": objective at continuous threshold " + num(c) +
                                     " within 2% of the empirical optimum on " + std::to_string(within) +
                                     "/50 samples (worst ratio " + num(worst_ratio) + ")");
        log.note(f.name + ": mean ratio " + num(sum_ratio / 50));
    }
}

void check_shift(Log& log, const VerifyOptions& opts) {
    const std::size_t triples = opts.n.value_or(400);
    auto rng = substream(opts.seed, 10);
    boost::random::uniform_01<double> unit;
    const std::vector<FamilySpec> fams{GaussianSpec{0.5, 1.3}, LaplaceSpec{-0.4, 0.7}, UniformSpec{-1, 2},
                                       WeibullSpec{2.2}, kTwoMaxima};
    const std::size_t per = 20;
    double worst = 0.0;
    std::size_t done = 0;
    for (std::size_t pair = 0; done < triples; ++pair) {
        const auto x = affine(make_family(fams[pair % fams.size()]), 1.0, -3 + 6 * unit(rng));
        const double mu = x.mean();
        const auto y = affine(x, 1.0, -mu);
        for (std::size_t i = 0; i < per && done < triples; ++i, ++done) {
            const double t = quantile(x, 0.001 + 0.998 * unit(rng));
            worst = std::max(worst, std::abs(split_score(x, t) - split_score(y, t - mu) - mu * mu));
        }
    }
    log.expect(worst < 1e-8, std::to_string(triples) + " triples: max |score_X(t) - score_(X-mu)(t-mu) - mu^2| = " +
                                 err(worst) + " (tol 1e-08)");
}

struct Entry {
    std::string name;
    std::string claim;
    double budget;
    void (*run)(Log&, const VerifyOptions&);
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list{
        {"gaussian", "a Gaussian law splits at its mean with levels mean -+ sigma sqrt(2/pi)", 1.0, check_gaussian},
        {"two-maxima", "the piecewise law with a central spike has two optimal thresholds +-(2 sqrt 5 - 4)", 5.0,
         check_two_maxima},
        {"hexagon", "on the centred integer hexagon the cut x = 1 beats the cut through the mean", 0.1, check_hexagon},
        {"lemma", "exp(-V(0)) int y exp(-V) <= (int exp(-V))^2 for convex V, with equality for affine V", 30.0,
         check_lemma},
        {"monotonicity", "log-concave laws have nonincreasing residual life and nondecreasing inactivity time", 10.0,
         check_monotonicity},
        {"weibull", "the Weibull shape with mean = median is about 3.44 and splits at its mean", 2.0, check_weibull},
        {"elliptical", "the best halfspace of an elliptical law passes through the mean along the top eigenvector",
         10.0, check_elliptical},
        {"montecarlo", "sampled halfspace scores and regression slopes match their closed forms", 60.0,
         check_montecarlo},
        {"oracle", "the continuous optimal threshold is near optimal on samples of the law", 30.0, check_oracle},
        {"shift", "shifting a law by mu shifts its split score: score_X(t) = score_(X-mu)(t - mu) + mu^2", 10.0, check_shift},
    };
    return list;
}

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : entries()) out.push_back(e.name);
        return out;
    }();
    return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& opts) {
    const auto& list = entries();
    const auto it = std::find_if(list.begin(), list.end(), [&](const Entry& e) { return e.name == name; });
    if (it == list.end()) throw DomainError("unknown check '" + name + "'");
    Log log;
    try {
        it->run(log, opts);
    } catch (const std::exception& e) {
        log.expect(false, std::string("error: ") + e.what());
    }
    return {static_cast<int>(it - list.begin()) + 1, it->name, it->claim, log.ok, std::move(log.lines), it->budget};
}

std::vector<CheckResult> run_all_checks(const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    for (const auto& name : check_names()) out.push_back(run_check(name, opts));
    return out;
}

}  // namespace regimesplit
