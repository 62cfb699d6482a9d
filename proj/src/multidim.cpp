#include "regimesplit/multidim.hpp"

#include "regimesplit/errors.hpp"
#include "regimesplit/parallel.hpp"
#include "regimesplit/random.hpp"
#include "regimesplit/splitcore.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regimesplit {

namespace {

constexpr std::size_t kBatch = 8192;

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DomainError(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                          std::to_string(want));
}

void require_symmetric(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw DomainError("matrix must be square and non-empty");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            if (!std::isfinite(a(i, j)) || !std::isfinite(a(j, i))) throw DomainError("matrix entries must be finite");
            if (std::abs(a(i, j) - a(j, i)) > 1e-12) throw DomainError("matrix is not symmetric");
        }
}

void fix_sign(Matrix& v, std::size_t col) {
    double scale = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) scale = std::max(scale, std::abs(v(i, col)));
    for (std::size_t i = 0; i < v.rows(); ++i) {
        if (std::abs(v(i, col)) > 1e-12 * scale) {
            if (v(i, col) < 0)
                for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) = -v(k, col);
            return;
        }
    }
}

// The scaled projection law <Y, u> for unit u.
Density1D projection_law(const EllipticalModel& model, const Vector& unit_u) {
    return affine(model.z0(), std::sqrt(dot(unit_u, model.sigma() * unit_u)), 0.0);
}

double shape_factor(const Matrix& sigma, const Vector& unit_u) {
    const Vector su = sigma * unit_u;
    const double q = dot(unit_u, su);
    return dot(su, su) / (q * q);
}

void require_gaussian(const EllipticalModel& model) {
    if (model.kind() != EllipticalKind::gaussian)
        throw DomainError("sampling is only implemented for Gaussian models");
}

// Draws batch b: calls visit(x - mu) for each of its points.
template <class Visit>
void draw_batch(const Matrix& chol, std::uint64_t seed, std::size_t b, std::size_t count, Visit&& visit) {
    auto rng = substream(seed, b);
    boost::random::normal_distribution<double> normal;
    const std::size_t d = chol.rows();
    Vector g(d), y(d);
    for (std::size_t i = 0; i < count; ++i) {
        for (auto& gi : g) gi = normal(rng);
        for (std::size_t r = 0; r < d; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c <= r; ++c) s += chol(r, c) * g[c];
            y[r] = s;
        }
        visit(y);
    }
}

std::size_t batch_count(std::size_t n) { return (n + kBatch - 1) / kBatch; }
std::size_t batch_size(std::size_t n, std::size_t b) { return std::min(kBatch, n - b * kBatch); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw DomainError("ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Vector operator*(const Matrix& a, const Vector& x) {
    require_dim(x.size(), a.cols(), "vector");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_dim(b.rows(), a.cols(), "matrix");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double dot(const Vector& a, const Vector& b) {
    require_dim(b.size(), a.size(), "vector");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector normalized(const Vector& a) {
    const double n = norm(a);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("direction must be a finite nonzero vector");
    Vector out(a);
    for (auto& x : out) x /= n;
    return out;
}

SymmetricEigen eigen_symmetric(const Matrix& input, double tol, int max_sweeps) {
    require_symmetric(input);
    const std::size_t n = input.rows();
    Matrix a = input;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
    Matrix v = Matrix::identity(n);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
    total = std::sqrt(total);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (off_norm() <= tol * total) {
            converged = true;
            break;
        }
        if (sweep == max_sweeps) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::abs(theta) > 1e150 ? 0.5 / theta
                                                         : std::copysign(1.0, theta) /
                                                               (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) throw EigenFailure("Jacobi iteration did not converge in " + std::to_string(max_sweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
        fix_sign(out.vectors, c);
    }
    return out;
}

Matrix cholesky(const Matrix& a) {
    require_symmetric(a);
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw DomainError("matrix is not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

EllipticalModel::EllipticalModel(Vector mu, Matrix sigma, Density1D z0, EllipticalKind kind, std::string z0_name)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), z0_(normalize(z0)), kind_(kind), z0_name_(std::move(z0_name)) {
    if (mu_.empty()) throw DomainError("model dimension must be at least 1");
    for (double m : mu_)
        if (!std::isfinite(m)) throw DomainError("mean must be finite");
    require_dim(sigma_.rows(), mu_.size(), "scatter matrix");
    require_symmetric(sigma_);
    const auto eig = eigen_symmetric(sigma_);
    if (!(eig.values.back() > 0.0)) throw DomainError("scatter matrix is not positive definite");
    if (std::abs(z0_.mean()) > 1e-9) throw DomainError("projection law must have mean 0");
    if (std::abs(cdf(z0_, 0.0) - 0.5) > 1e-9) throw DomainError("projection law must have median 0");
}

EllipticalModel make_elliptical(Vector mu, Matrix sigma, const std::string& z0_family) {
    if (z0_family == "gaussian")
        return {std::move(mu), std::move(sigma), make_family(GaussianSpec{0.0, 1.0}), EllipticalKind::gaussian,
                z0_family};
    if (z0_family == "uniform")
        return {std::move(mu), std::move(sigma), make_family(UniformSpec{-std::sqrt(3.0), std::sqrt(3.0)}),
                EllipticalKind::custom, z0_family};
    if (z0_family == "laplace")
        return {std::move(mu), std::move(sigma), make_family(LaplaceSpec{0.0, 1.0 / std::sqrt(2.0)}),
                EllipticalKind::custom, z0_family};
    throw DomainError("unknown projection family '" + z0_family + "' (expected gaussian, uniform or laplace)");
}

bool Halfspace::contains(const Vector& x) const { return dot(x, normal) <= offset; }

Halfspace quad_regime_halfspace(const Vector& alpha, const Vector& beta) {
    require_dim(beta.size(), alpha.size(), "beta");
    Vector diff(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) diff[i] = beta[i] - alpha[i];
    const double len = norm(diff);
    if (!(len > 0.0)) throw DomainError("alpha equals beta: every set is optimal");
    for (auto& x : diff) x /= len;
    return {diff, (dot(beta, beta) - dot(alpha, alpha)) / (2.0 * len)};
}

bool cubic_region_member(double x, double y) { return y >= ((2.0 * x - 3.0) * x + 3.0) * x - 1.0; }

double F_halfspace(const EllipticalModel& model, const Vector& u, double t) {
    require_dim(u.size(), model.dim(), "direction");
    const Vector unit = normalized(u);
    const Density1D z = projection_law(model, unit);
    const double p = tail_mass(z, t, Side::lower);
    const double q = tail_mass(z, t, Side::upper);
    if (p <= z.quadrature().abs_tol || q <= z.quadrature().abs_tol)
        throw DegenerateRegime("halfspace has probability 0 or 1 at t = " + std::to_string(t));
    const double e = partial_mean(z, t, Side::lower);
    return dot(model.mu(), model.mu()) + shape_factor(model.sigma(), unit) * e * e / (p * q);
}

double c0(const EllipticalModel& model) { return partial_mean(model.z0(), 0.0, Side::upper); }

double rayleigh(const Matrix& sigma, const Vector& u) {
    const Vector unit = normalized(u);
    const Vector su = sigma * unit;
    return dot(su, su) / dot(unit, su);
}

DirectionResult best_direction(const EllipticalModel& model) {
    const auto eig = eigen_symmetric(model.sigma());
    DirectionResult r;
    r.u_star.resize(model.dim());
    for (std::size_t i = 0; i < model.dim(); ++i) r.u_star[i] = eig.vectors(i, 0);
    r.u_star = normalized(r.u_star);
    r.lambda_max = eig.values.front();
    r.c0 = c0(model);
    r.value_at_zero = 4.0 * r.c0 * r.c0 * r.lambda_max;
    return r;
}

OptimalTReport optimal_t_check(const EllipticalModel& model, const Vector& u, int grid_n) {
    require_dim(u.size(), model.dim(), "direction");
    const Vector unit = normalized(u);
    const Density1D z = projection_law(model, unit);
    const SplitResult lc = solve_logconcave(z);
    const SplitResult grid = solve_global(z, grid_n);
    OptimalTReport r;
    r.t_star = lc.thresholds.front();
    // split_score carries mean^2, which is 0 here up to quadrature error.
    r.max_value = shape_factor(model.sigma(), unit) * (lc.fx_value - z.mean() * z.mean());
    r.grid_t_star = grid.thresholds.front();
    return r;
}

MonteCarloEstimate F_mc(const EllipticalModel& model, const Vector& u, double t, std::size_t n, std::uint64_t seed) {
    require_gaussian(model);
    require_dim(u.size(), model.dim(), "direction");
    if (n < 1000) throw DomainError("Monte Carlo needs n >= 1000");
    const Vector unit = normalized(u);
    const Matrix chol = cholesky(model.sigma());
    const Vector& mu = model.mu();
    const std::size_t d = model.dim();
    const std::size_t m = 1 + 2 * d;  // indicator, x on A, x off A

    struct Sums {
        Vector s;
        Vector ss;  // m x m, row-major
    };
    const std::size_t batches = batch_count(n);
    std::vector<Sums> parts(batches);
    parallel_for(batches, [&](std::size_t b) {
        Sums acc{Vector(m, 0.0), Vector(m * m, 0.0)};
        Vector w(m);
        draw_batch(chol, seed, b, batch_size(n, b), [&](const Vector& y) {
            const bool in = dot(y, unit) <= t;
            w[0] = in ? 1.0 : 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double x = mu[i] + y[i];
                w[1 + i] = in ? x : 0.0;
                w[1 + d + i] = in ? 0.0 : x;
            }
            for (std::size_t i = 0; i < m; ++i) {
                acc.s[i] += w[i];
                for (std::size_t j = 0; j < m; ++j) acc.ss[i * m + j] += w[i] * w[j];
            }
        });
        parts[b] = std::move(acc);
    });
    Sums tot{Vector(m, 0.0), Vector(m * m, 0.0)};
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < m; ++i) tot.s[i] += p.s[i];
        for (std::size_t i = 0; i < m * m; ++i) tot.ss[i] += p.ss[i];
    }

    const double nn = static_cast<double>(n);
    Vector mean(m);
    for (std::size_t i = 0; i < m; ++i) mean[i] = tot.s[i] / nn;
    const double p = mean[0];
    if (p <= 0.0 || p >= 1.0) throw DegenerateRegime("every sample fell on one side of the halfspace");
    double in2 = 0.0, out2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        in2 += mean[1 + i] * mean[1 + i];
        out2 += mean[1 + d + i] * mean[1 + d + i];
    }
    const double value = in2 / p + out2 / (1.0 - p);

    Vector grad(m);
    grad[0] = -in2 / (p * p) + out2 / ((1.0 - p) * (1.0 - p));
    for (std::size_t i = 0; i < d; ++i) {
        grad[1 + i] = 2.0 * mean[1 + i] / p;
        grad[1 + d + i] = 2.0 * mean[1 + d + i] / (1.0 - p);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double cov = (tot.ss[i * m + j] / nn - mean[i] * mean[j]) * nn / (nn - 1.0);
            var += grad[i] * cov * grad[j];
        }
    return {value, std::sqrt(std::max(var, 0.0) / nn), n};
}

RegressionEstimate regression_slope_mc(const EllipticalModel& model, const Vector& u, const Vector& v, std::size_t n,
                                       std::uint64_t seed) {
    require_gaussian(model);
    require_dim(u.size(), model.dim(), "u");
    require_dim(v.size(), model.dim(), "v");
    if (n < 3) throw DomainError("regression needs n >= 3");
    const double vsv = dot(v, model.sigma() * v);
    if (!(vsv > 0.0)) throw DomainError("regressor direction must be nonzero");
    const Matrix chol = cholesky(model.sigma());

    // Projections of X - mu; the slope does not see the mean.
    struct Sums {
        double a = 0, b = 0, ab = 0, aa = 0, bb = 0;
    };
    const std::size_t batches = batch_count(n);
    std::vector<Sums> parts(batches);
    parallel_for(batches, [&](std::size_t k) {
        Sums s;
        draw_batch(chol, seed, k, batch_size(n, k), [&](const Vector& y) {
            const double a = dot(y, u);
            const double b = dot(y, v);
            s.a += a;
            s.b += b;
            s.ab += a * b;
            s.aa += a * a;
            s.bb += b * b;
        });
        parts[k] = s;
    });
    Sums s;
    for (const auto& p : parts) {
        s.a += p.a;
        s.b += p.b;
        s.ab += p.ab;
        s.aa += p.aa;
        s.bb += p.bb;
    }
    const double nn = static_cast<double>(n);
    const double sab = s.ab - s.a * s.b / nn;
    const double sbb = s.bb - s.b * s.b / nn;
    const double saa = s.aa - s.a * s.a / nn;
    const double slope = sab / sbb;
    const double resid = std::max(saa - slope * sab, 0.0) / (nn - 2.0);
    return {slope, std::sqrt(resid / sbb), dot(u, model.sigma() * v) / vsv};
}

Matrix random_spd(std::mt19937_64& rng, std::size_t d) {
    boost::random::normal_distribution<double> normal;
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = normal(rng);
    Matrix s = a * transpose(a);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) s(i, j) = s(i, j) / static_cast<double>(d) + (i == j ? 0.1 : 0.0);
    // Exact symmetry regardless of summation order.
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
    return s;
}

Vector random_unit_vector(std::mt19937_64& rng, std::size_t d) {
    boost::random::normal_distribution<double> normal;
    Vector v(d);
    for (auto& x : v) x = normal(rng);
    return normalized(v);
}

}  // namespace regimesplit
