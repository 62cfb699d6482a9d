#include "regimesplit/quadrature.hpp"

#include "regimesplit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace regimesplit {

namespace {

// Kronrod nodes (descending, last is the centre) and weights of the QUADPACK qk15 rule.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the embedded 7-point rule (nodes kNodes[1], [3], [5], [7]).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    double abs_value;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);

    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        lo[j] = f(centre - dx);
        hi[j] = f(centre + dx);
        kronrod += kKronrodWeights[j] * (lo[j] + hi[j]);
        abs_sum += kKronrodWeights[j] * (std::abs(lo[j]) + std::abs(hi[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (lo[j] + hi[j]);
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(lo[j] - mean) + std::abs(hi[j] - mean));

    const double result = kronrod * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(err, roundoff);
    return {a, b, result, err, resabs};
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_mass_eps > 0.0))
        throw DomainError("quadrature tolerances must be strictly positive");
    if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
    if (a == b) return {};
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: bounds must be finite");
    if (a > b) {
        QuadratureResult r = integrate(f, b, a, cfg);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel, std::vector<Panel>, ByError> panels;
    Panel first = gauss_kronrod(f, a, b);
    double total = first.value;
    double total_err = first.error;
    double total_abs = first.abs_value;
    panels.push(first);
    int count = 1;

    auto converged = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * total_abs); };

    while (!converged()) {
        if (!std::isfinite(total) || !std::isfinite(total_err))
            throw NonIntegrable("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        if (count >= cfg.max_subdivisions)
            throw NonIntegrable("quadrature did not converge within " + std::to_string(cfg.max_subdivisions) +
                                " subdivisions (error estimate " + std::to_string(total_err) + ")");
        Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Panels at the resolution limit of double cannot improve further.
        if (mid <= worst.a || mid >= worst.b) break;
        panels.pop();
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        panels.push(left);
        panels.push(right);
        ++count;
    }

    // Re-sum to drop the drift of the running updates.
    total = 0.0;
    total_err = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        total_err += panels.top().error;
        panels.pop();
    }
    if (!std::isfinite(total)) throw NonIntegrable("integrand is not finite");
    return {total, total_err, count};
}

QuadratureResult integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                           const QuadratureConfig& cfg) {
    if (a > b) {
        QuadratureResult r = integrate(f, b, a, breakpoints, cfg);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);

    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const QuadratureResult piece = integrate(f, cuts[i], cuts[i + 1], cfg);
        out.value += piece.value;
        out.error += piece.error;
        out.subdivisions += piece.subdivisions;
    }
    return out;
}

double tail_cutoff(const Integrand& f, double start, int dir, double width, double limit,
                   std::span<const double> breakpoints, const QuadratureConfig& cfg) {
    if (dir != 1 && dir != -1) throw DomainError("tail_cutoff: direction must be +1 or -1");
    if (!(width > 0.0)) throw DomainError("tail_cutoff: width must be positive");
    constexpr int kMaxChunks = 96;

    double accumulated = 0.0;
    double x = start;
    for (int i = 0; i < kMaxChunks; ++i) {
        double next = x + dir * width;
        const bool at_limit = std::isfinite(limit) && (dir > 0 ? next >= limit : next <= limit);
        if (at_limit) next = limit;
        if (!std::isfinite(next)) break;
        const double chunk = integrate(f, std::min(x, next), std::max(x, next), breakpoints, cfg).value;
        if (!std::isfinite(chunk)) throw NonIntegrable("tail integral overflows");
        accumulated += chunk;
        x = next;
        if (at_limit) return limit;
        if (accumulated > 0.0 && chunk <= cfg.tail_mass_eps * accumulated) return x;
        width *= 2.0;
    }
    throw NonIntegrable("tail mass does not vanish (integrand not integrable at infinity)");
}

}  // namespace regimesplit
