#include "sor/gauss_filter.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sor {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_angular(const std::vector<bool>& angular, Index i)
{
    return !angular.empty() && angular[static_cast<std::size_t>(i)];
}

void check_angular_size(const std::vector<bool>& angular, Index m)
{
    if (!angular.empty() && static_cast<Index>(angular.size()) != m) {
        throw DimensionError("angular mask size does not match the measurement dimension");
    }
}

// Pushes sigma points through h. Angular rows are unwrapped relative to the
// center point so the weighted mean does not straddle the +-pi cut.
MatrixXd transform_measurement(const NonlinearSSM& model, const SigmaPointSet& sigma)
{
    MatrixXd z = transform_points(sigma, model.meas_fn);
    if (z.rows() != model.meas_dim) {
        throw DimensionError("meas_fn output size differs from meas_dim");
    }
    check_angular_size(model.angular_dims, model.meas_dim);
    for (Index i = 0; i < z.rows(); ++i) {
        if (!is_angular(model.angular_dims, i)) {
            continue;
        }
        const double ref = z(i, 0);
        for (Index j = 1; j < z.cols(); ++j) {
            z(i, j) = ref + wrap_angle(z(i, j) - ref);
        }
    }
    return z;
}

void check_update_inputs(const GaussianBelief& predicted, const PredictedMeasurement& pm, const VectorXd& y,
                         const VectorXd& vinv, const std::vector<bool>& angular)
{
    const Index n = predicted.dim();
    const Index m = pm.mu.size();
    if (y.size() != m || vinv.size() != m) {
        throw DimensionError("measurement, precision and predicted mean sizes differ");
    }
    if (pm.C.rows() != n || pm.C.cols() != m) {
        throw DimensionError("cross-covariance must be n x m");
    }
    if (pm.has_dense_cov() && (pm.U.rows() != m || pm.U.cols() != m)) {
        throw DimensionError("measurement covariance must be m x m");
    }
    if (!vinv.allFinite() || (vinv.array() < 0.0).any()) {
        throw std::invalid_argument("effective precisions must be finite and non-negative");
    }
    check_angular_size(angular, m);
}

} // namespace

double wrap_angle(double angle)
{
    double r = std::remainder(angle, 2.0 * kPi);
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    return r;
}

VectorXd innovation(const VectorXd& y, const VectorXd& mu, const std::vector<bool>& angular)
{
    VectorXd e = y - mu;
    if (!angular.empty()) {
        check_angular_size(angular, e.size());
        for (Index i = 0; i < e.size(); ++i) {
            if (angular[static_cast<std::size_t>(i)]) {
                e(i) = wrap_angle(e(i));
            }
        }
    }
    return e;
}

GaussianBelief predict(const NonlinearSSM& model, const GaussianBelief& posterior, const UTParams& params, long k)
{
    const SigmaPointSet sigma = draw_sigma_points(posterior, params);
    const MatrixXd fx = transform_points(sigma, model.process_fn);
    if (fx.rows() != posterior.dim()) {
        throw DimensionError("process_fn output size differs from the state dimension");
    }
    const VectorXd mean = fx * sigma.mean_weights;
    const MatrixXd dev = fx.colwise() - mean;
    const MatrixXd q = model.process_cov_for(k);
    if (q.rows() != posterior.dim() || q.cols() != posterior.dim()) {
        throw DimensionError("process_cov dimension mismatch");
    }
    MatrixXd cov = dev * sigma.cov_weights.asDiagonal() * dev.transpose();
    cov += q;
    return GaussianBelief::from_update(mean, cov);
}

PredictedMeasurement predict_measurement(const NonlinearSSM& model, const GaussianBelief& belief,
                                         const UTParams& params, bool dense)
{
    const SigmaPointSet sigma = draw_sigma_points(belief, params);
    const MatrixXd z = transform_measurement(model, sigma);

    PredictedMeasurement out;
    out.mu = z * sigma.mean_weights;
    MatrixXd dz = z.colwise() - out.mu;
    MatrixXd dx = sigma.points.colwise() - belief.mean();
    out.C = dx * sigma.cov_weights.asDiagonal() * dz.transpose();
    if (dense) {
        out.U = dz * sigma.cov_weights.asDiagonal() * dz.transpose();
        out.U = 0.5 * (out.U + out.U.transpose()).eval();
    }
    out.factor = JointFactor{std::move(dx), std::move(dz), sigma.cov_weights.asDiagonal()};
    return out;
}

PredictedMeasurement relinearized_measurement(const NonlinearSSM& model, const GaussianBelief& prior,
                                              const GaussianBelief& iterate, const UTParams& params, bool dense)
{
    const Index n = prior.dim();
    const SigmaPointSet sigma = draw_sigma_points(iterate, params);
    const MatrixXd z = transform_measurement(model, sigma);
    const Index m = z.rows();
    const Index l = sigma.size();

    const VectorXd mu_it = z * sigma.mean_weights;
    const MatrixXd dz = z.colwise() - mu_it;
    const MatrixXd dx = sigma.points.colwise() - iterate.mean();
    const MatrixXd c_it = dx * sigma.cov_weights.asDiagonal() * dz.transpose();

    // Regression slope H = C^T P^-1 about the iterate.
    const MatrixXd slope = iterate.cov().llt().solve(c_it).transpose();
    const MatrixXd resid = dz - slope * dx;

    PredictedMeasurement out;
    out.mu = mu_it + slope * (prior.mean() - iterate.mean());
    out.C = prior.cov() * slope.transpose();
    if (dense) {
        out.U = slope * prior.cov() * slope.transpose() +
                resid * sigma.cov_weights.asDiagonal() * resid.transpose();
        out.U = 0.5 * (out.U + out.U.transpose()).eval();
    }

    const MatrixXd root = hygienic_cholesky(prior.cov()).lower;
    JointFactor factor;
    factor.state_dev = MatrixXd::Zero(n, n + l);
    factor.state_dev.leftCols(n) = root;
    factor.meas_dev.resize(m, n + l);
    factor.meas_dev.leftCols(n) = slope * root;
    factor.meas_dev.rightCols(l) = resid;
    factor.core = MatrixXd::Zero(n + l, n + l);
    factor.core.topLeftCorner(n, n).setIdentity();
    factor.core.bottomRightCorner(l, l) = sigma.cov_weights.asDiagonal();
    out.factor = std::move(factor);
    return out;
}

GaussianBelief update_parallel(const GaussianBelief& predicted, const PredictedMeasurement& pm, const VectorXd& y,
                               const VectorXd& vinv, const std::vector<bool>& angular)
{
    check_update_inputs(predicted, pm, y, vinv, angular);
    if (!pm.has_dense_cov()) {
        throw DimensionError("parallel update needs the dense measurement covariance");
    }
    const Index m = y.size();
    const VectorXd e = innovation(y, pm.mu, angular);

    // Woodbury form: V itself is never inverted, only V^-1 is used.
    MatrixXd u_vinv = pm.U * vinv.asDiagonal();
    MatrixXd a = u_vinv + MatrixXd::Identity(m, m);
    // Factor A^T so that C V^-1 A^-1 comes from one solve with n right-hand sides.
    const Eigen::PartialPivLU<MatrixXd> lu(a.transpose());
    const double rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
        throw NumericalError("I + U V^-1 is singular (rcond " + std::to_string(rcond) + ")");
    }
    const MatrixXd c_vinv = pm.C * vinv.asDiagonal();
    const MatrixXd solved = lu.solve(c_vinv.transpose()).transpose();
    const MatrixXd gain = c_vinv - solved * u_vinv;

    VectorXd mean = predicted.mean() + gain * e;
    MatrixXd cov = predicted.cov() - pm.C * gain.transpose();
    return GaussianBelief::from_update(std::move(mean), cov);
}

SerialUpdate update_serial(const GaussianBelief& predicted, const PredictedMeasurement& pm, const VectorXd& y,
                           const VectorXd& vinv, const std::vector<bool>& angular)
{
    check_update_inputs(predicted, pm, y, vinv, angular);
    const Index n = predicted.dim();
    const Index m = y.size();

    JointFactor dense_factor;
    const JointFactor* factor = nullptr;
    if (pm.factor) {
        factor = &*pm.factor;
    } else {
        if (!pm.has_dense_cov()) {
            throw DimensionError("serial update needs either the joint factor or the dense covariance");
        }
        dense_factor.state_dev = MatrixXd::Zero(n, n + m);
        dense_factor.state_dev.leftCols(n).setIdentity();
        dense_factor.meas_dev = MatrixXd::Zero(m, n + m);
        dense_factor.meas_dev.rightCols(m).setIdentity();
        dense_factor.core.resize(n + m, n + m);
        dense_factor.core << predicted.cov(), pm.C, pm.C.transpose(), pm.U;
        factor = &dense_factor;
    }
    const Index l = factor->core.rows();
    if (factor->state_dev.rows() != n || factor->meas_dev.rows() != m || factor->state_dev.cols() != l ||
        factor->meas_dev.cols() != l || factor->core.cols() != l) {
        throw DimensionError("joint factor shapes are inconsistent");
    }

    const MatrixXd dz_t = factor->meas_dev.transpose(); // column i = row i of Z
    MatrixXd core = factor->core;
    VectorXd coeff = VectorXd::Zero(l);
    VectorXd g(l);
    for (Index i = 0; i < m; ++i) {
        if (vinv(i) == 0.0) {
            continue; // infinite noise: nothing to condition on
        }
        const auto d = dz_t.col(i);
        g.noalias() = core * d;
        const double s = d.dot(g) + 1.0 / vinv(i);
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw NumericalError("non-positive innovation variance at measurement dimension " + std::to_string(i));
        }
        double e = y(i) - (pm.mu(i) + d.dot(coeff));
        if (is_angular(angular, i)) {
            e = wrap_angle(e);
        }
        coeff.noalias() += (e / s) * g;
        core.noalias() -= (1.0 / s) * g * g.transpose();
    }

    const MatrixXd removed = factor->core - core;
    VectorXd mean = predicted.mean() + factor->state_dev * coeff;
    MatrixXd cov = predicted.cov() - factor->state_dev * removed * factor->state_dev.transpose();

    SerialUpdate out{GaussianBelief::from_update(std::move(mean), cov), {}, {}};
    out.meas_mean = pm.mu + factor->meas_dev * coeff;
    out.meas_var = (factor->meas_dev * core).cwiseProduct(factor->meas_dev).rowwise().sum();
    out.meas_var = out.meas_var.cwiseMax(0.0);
    return out;
}

MeasurementMarginals posterior_predictive_meas(const PredictedMeasurement& pm)
{
    if (pm.has_dense_cov()) {
        return {pm.mu, pm.U.diagonal()};
    }
    if (!pm.factor) {
        throw DimensionError("predicted measurement carries neither U nor a joint factor");
    }
    const auto& f = *pm.factor;
    VectorXd var = (f.meas_dev * f.core).cwiseProduct(f.meas_dev).rowwise().sum();
    return {pm.mu, var.cwiseMax(0.0)};
}

MeasurementMarginals posterior_predictive_meas(const SerialUpdate& update)
{
    return {update.meas_mean, update.meas_var};
}

MeasurementMarginals posterior_predictive_meas(const NonlinearSSM& model, const GaussianBelief& posterior,
                                               const UTParams& params)
{
    const SigmaPointSet sigma = draw_sigma_points(posterior, params);
    const MatrixXd z = transform_measurement(model, sigma);
    MeasurementMarginals out;
    out.mean = z * sigma.mean_weights;
    const MatrixXd dz = z.colwise() - out.mean;
    out.var = (dz.array().square().matrix() * sigma.cov_weights).cwiseMax(0.0);
    return out;
}

} // namespace sor
