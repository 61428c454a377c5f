#include "sor/core_model.hpp"

#include <algorithm>
#include <cmath>

namespace sor {

namespace {

bool try_cholesky(const MatrixXd& cov, MatrixXd& lower)
{
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    lower = llt.matrixL();
    return lower.allFinite() && (lower.diagonal().array() > 0.0).all();
}

} // namespace

FactoredCovariance hygienic_cholesky(const MatrixXd& cov)
{
    if (cov.rows() != cov.cols()) {
        throw DimensionError("covariance must be square");
    }
    if (!cov.allFinite()) {
        throw NumericalError("covariance contains non-finite entries");
    }
    FactoredCovariance out;
    out.cov = 0.5 * (cov + cov.transpose());
    if (try_cholesky(out.cov, out.lower)) {
        return out;
    }
    const double n = static_cast<double>(cov.rows());
    const double jitter = 1e-9 * out.cov.trace() / n;
    if (jitter > 0.0) {
        out.cov.diagonal().array() += jitter;
        if (try_cholesky(out.cov, out.lower)) {
            return out;
        }
    }
    throw NumericalError("covariance is not positive definite after jitter");
}

GaussianBelief::GaussianBelief(VectorXd mean, MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov))
{
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
        throw std::invalid_argument("belief covariance must be n x n with n = mean size");
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        throw std::invalid_argument("belief contains non-finite entries");
    }
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("belief covariance is not symmetric");
    }
    MatrixXd lower;
    if (!try_cholesky(cov_, lower)) {
        throw std::invalid_argument("belief covariance is not positive definite");
    }
}

GaussianBelief::GaussianBelief(VectorXd mean, MatrixXd cov, Trusted)
    : mean_(std::move(mean)), cov_(std::move(cov))
{
}

GaussianBelief GaussianBelief::from_update(VectorXd mean, const MatrixXd& cov)
{
    if (cov.rows() != mean.size()) {
        throw DimensionError("belief covariance must be n x n with n = mean size");
    }
    if (!mean.allFinite()) {
        throw NumericalError("updated mean is not finite");
    }
    auto factored = hygienic_cholesky(cov);
    return GaussianBelief(std::move(mean), std::move(factored.cov), Trusted{});
}

ValidationResult validate_model(const NonlinearSSM& model)
{
    ValidationResult result;
    auto& errors = result.errors;
    const Index n = model.state_dim;
    const Index m = model.meas_dim;

    if (n <= 0) {
        errors.emplace_back("state_dim must be positive");
    }
    if (m <= 0) {
        errors.emplace_back("meas_dim must be positive");
    }
    if (model.process_cov.rows() != n || model.process_cov.cols() != n) {
        errors.emplace_back("process_cov dimension mismatch");
    } else if (!model.process_cov.allFinite()) {
        errors.emplace_back("process_cov must be finite");
    } else if ((model.process_cov - model.process_cov.transpose()).cwiseAbs().maxCoeff() >
               1e-12 * std::max(1.0, model.process_cov.cwiseAbs().maxCoeff())) {
        errors.emplace_back("process_cov must be symmetric");
    }
    if (model.meas_var_diag.size() != m) {
        errors.emplace_back("meas_var_diag dimension mismatch");
    } else if (!(model.meas_var_diag.array() > 0.0).all() || !model.meas_var_diag.allFinite()) {
        errors.emplace_back("meas_var_diag must be strictly positive");
    }
    if (!model.angular_dims.empty() && static_cast<Index>(model.angular_dims.size()) != m) {
        errors.emplace_back("angular_dims dimension mismatch");
    }

    if (n > 0) {
        const VectorXd zero = VectorXd::Zero(n);
        if (!model.process_fn) {
            errors.emplace_back("process_fn is not set");
        } else {
            try {
                const VectorXd fx = model.process_fn(zero);
                if (fx.size() != n) {
                    errors.emplace_back("process_fn output dimension mismatch");
                } else if (!fx.allFinite()) {
                    errors.emplace_back("process_fn is not finite at the zero vector");
                }
            } catch (const std::exception& e) {
                errors.emplace_back(std::string("process_fn threw at the zero vector: ") + e.what());
            }
        }
        if (!model.meas_fn) {
            errors.emplace_back("meas_fn is not set");
        } else {
            try {
                const VectorXd hx = model.meas_fn(zero);
                if (hx.size() != m) {
                    errors.emplace_back("meas_fn output dimension mismatch");
                } else if (!hx.allFinite()) {
                    errors.emplace_back("meas_fn is not finite at the zero vector");
                }
            } catch (const std::exception& e) {
                errors.emplace_back(std::string("meas_fn threw at the zero vector: ") + e.what());
            }
        }
    }
    return result;
}

} // namespace sor
