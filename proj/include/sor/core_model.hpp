// State-space model abstraction and belief types shared by all filters.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sor {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised when a covariance cannot be factorized or an update produces
/// non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on inconsistent vector/matrix sizes passed across module boundaries.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Map from one real vector to another (process or measurement function).
using VectorMap = std::function<VectorXd(const VectorXd&)>;

/// Symmetrizes `cov` and returns it together with its lower Cholesky factor.
///
/// If the first factorization fails, a jitter of 1e-9 * trace(P) / n is added
/// to the diagonal once and the factorization retried; a second failure
/// throws NumericalError.
struct FactoredCovariance {
    MatrixXd cov;
    MatrixXd lower;
};
FactoredCovariance hygienic_cholesky(const MatrixXd& cov);

/// Gaussian state belief N(mean, cov). The covariance is always symmetric and
/// admits a Cholesky factorization.
class GaussianBelief {
public:
    /// Strict constructor: throws std::invalid_argument when the covariance is
    /// not square, not symmetric (1e-12 relative), or not positive definite.
    GaussianBelief(VectorXd mean, MatrixXd cov);

    /// Builds a belief from the output of a filter update, applying the
    /// covariance hygiene policy (symmetrize, then one jitter retry).
    static GaussianBelief from_update(VectorXd mean, const MatrixXd& cov);

    const VectorXd& mean() const { return mean_; }
    const MatrixXd& cov() const { return cov_; }
    Index dim() const { return mean_.size(); }

private:
    struct Trusted {};
    GaussianBelief(VectorXd mean, MatrixXd cov, Trusted);

    VectorXd mean_;
    MatrixXd cov_;
};

/// Nonlinear SSM  x_k = f(x_{k-1}) + q,  y_k = h(x_k) + r  with Q and a
/// diagonal R. Angles are in radians.
struct NonlinearSSM {
    Index state_dim = 0;
    Index meas_dim = 0;
    VectorMap process_fn;
    VectorMap meas_fn;
    MatrixXd process_cov;   // Q, n x n, symmetric PSD
    VectorXd meas_var_diag; // diagonal of R, all > 0

    /// Measurement dimensions whose innovations wrap to (-pi, pi]. Empty means
    /// no angular dimensions.
    std::vector<bool> angular_dims;

    /// Optional per-step overrides; `k` is the 1-based time index.
    std::function<MatrixXd(long k)> process_cov_at;
    std::function<VectorXd(long k)> meas_var_at;

    MatrixXd process_cov_for(long k) const { return process_cov_at ? process_cov_at(k) : process_cov; }
    VectorXd meas_var_for(long k) const { return meas_var_at ? meas_var_at(k) : meas_var_diag; }
};

/// A measurement vector at time index k >= 1. Missing readings are encoded as
/// 0.0 upstream; the filter never sees a mask.
struct Measurement {
    long time_index = 1;
    VectorXd values;
};

struct ValidationResult {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

/// Checks the model invariants without side effects. Each violation is
/// reported with the offending field name.
ValidationResult validate_model(const NonlinearSSM& model);

} // namespace sor
