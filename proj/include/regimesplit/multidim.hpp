#pragma once

#include "regimesplit/density.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace regimesplit {

using Vector = std::vector<double>;

/// Dense row-major matrix; only what the small eigen and Cholesky routines need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    /// Throws DomainError for ragged rows.
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector operator*(const Matrix& a, const Vector& x);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
/// a / |a|. Throws DomainError for the zero vector.
Vector normalized(const Vector& a);

struct SymmetricEigen {
    Vector values;   ///< descending
    Matrix vectors;  ///< column j belongs to values[j]; first nonzero entry positive
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm is at most
/// tol times that of the whole matrix. Throws EigenFailure after max_sweeps sweeps,
/// DomainError for non-square or asymmetric (beyond 1e-12) input.
SymmetricEigen eigen_symmetric(const Matrix& a, double tol = 1e-12, int max_sweeps = 100);

/// Lower-triangular L with L L^T = a. Throws DomainError unless a is positive definite.
Matrix cholesky(const Matrix& a);

enum class EllipticalKind { gaussian, custom };

/// Elliptical law mu + Y where every projection <Y, u> has the law of
/// sqrt(u^T sigma u) Z0.
class EllipticalModel {
public:
    /// Throws DomainError when sigma is not symmetric (1e-12) positive definite, when
    /// the dimensions disagree, or when z0 is not centred with median 0 (1e-9).
    EllipticalModel(Vector mu, Matrix sigma, Density1D z0, EllipticalKind kind = EllipticalKind::custom,
                    std::string z0_name = "custom");

    std::size_t dim() const { return mu_.size(); }
    const Vector& mu() const { return mu_; }
    const Matrix& sigma() const { return sigma_; }
    const Density1D& z0() const { return z0_; }
    EllipticalKind kind() const { return kind_; }
    const std::string& z0_name() const { return z0_name_; }

private:
    Vector mu_;
    Matrix sigma_;
    Density1D z0_;
    EllipticalKind kind_;
    std::string z0_name_;
};

/// Unit-variance projection law by name: gaussian, uniform (on +-sqrt 3) or laplace.
/// gaussian gives the gaussian kind. Throws DomainError for other names.
EllipticalModel make_elliptical(Vector mu, Matrix sigma, const std::string& z0_family = "gaussian");

/// {x : <x, normal> <= offset} with a unit normal.
struct Halfspace {
    Vector normal;
    double offset;

    bool contains(const Vector& x) const;
};

/// Points at least as close to alpha as to beta. Throws DomainError if alpha == beta.
Halfspace quad_regime_halfspace(const Vector& alpha, const Vector& beta);

/// Whether G(x, y) <= G(x - 1, y) for G(x, y) = (x - y)^2 + x^4, i.e. whether
/// (x, y) lies on or above the cubic y = 2x^3 - 3x^2 + 3x - 1.
bool cubic_region_member(double x, double y);

/// |mu|^2 plus the best two-level score over the halfspace {<x - mu, u> <= t} (u
/// normalized internally). Throws DegenerateRegime when the halfspace has probability 0 or 1.
double F_halfspace(const EllipticalModel& model, const Vector& u, double t);

/// E[(Z0)+].
double c0(const EllipticalModel& model);

/// u^T sigma^2 u / u^T sigma u. Throws DomainError for u = 0.
double rayleigh(const Matrix& sigma, const Vector& u);

struct DirectionResult {
    Vector u_star;
    double lambda_max;
    double value_at_zero;  ///< 4 c0^2 lambda_max, the centred score at t = 0
    double c0;
};

DirectionResult best_direction(const EllipticalModel& model);

struct OptimalTReport {
    double t_star;       ///< log-concave solver on the projection law
    double max_value;    ///< F(u, t_star) - |mu|^2
    double grid_t_star;  ///< grid search confirmation
};

/// Maximizer of t -> F(u, t). Throws NotLogConcave when z0 is not log-concave.
OptimalTReport optimal_t_check(const EllipticalModel& model, const Vector& u, int grid_n = 512);

struct MonteCarloEstimate {
    double value;
    double std_error;  ///< delta method
    std::size_t n;
};

/// Plug-in estimate of |E[X 1_A]|^2 / P(A) + |E[X 1_A^c]|^2 / P(A^c) for
/// A = {<x - mu, u> <= t} from n Gaussian draws. Draws come in fixed batches, each
/// from its own substream of `seed`, so the estimate is bit-identical for a given
/// seed whatever the thread count.
/// Throws DomainError for a non-Gaussian model or n < 1000, DegenerateRegime if
/// every draw falls on one side.
MonteCarloEstimate F_mc(const EllipticalModel& model, const Vector& u, double t, std::size_t n, std::uint64_t seed);

struct RegressionEstimate {
    double slope;
    double std_error;
    double expected;  ///< u^T sigma v / v^T sigma v
};

/// Least-squares slope of <X, u> on <X, v> over n Gaussian draws.
RegressionEstimate regression_slope_mc(const EllipticalModel& model, const Vector& u, const Vector& v, std::size_t n,
                                       std::uint64_t seed);

/// A A^T / d + 0.1 I with standard normal entries in A.
Matrix random_spd(std::mt19937_64& rng, std::size_t d);
Vector random_unit_vector(std::mt19937_64& rng, std::size_t d);

}  // namespace regimesplit
