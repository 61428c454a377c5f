#include "sor/unscented.hpp"

#include <cmath>
#include <string>

namespace sor {

void UTParams::validate(Index n) const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("UT alpha must lie in (0, 1]");
    }
    if (!(beta >= 0.0) || !(kappa >= 0.0)) {
        throw std::invalid_argument("UT beta and kappa must be non-negative");
    }
    if (!(static_cast<double>(n) + lambda(n) > 0.0)) {
        throw std::invalid_argument("UT scaling requires n + lambda > 0");
    }
}

SigmaPointSet draw_sigma_points(const GaussianBelief& belief, const UTParams& params)
{
    const Index n = belief.dim();
    params.validate(n);
    const double lambda = params.lambda(n);
    const double scale = static_cast<double>(n) + lambda;

    const MatrixXd root = hygienic_cholesky(scale * belief.cov()).lower;

    SigmaPointSet sigma;
    sigma.points.resize(n, 2 * n + 1);
    sigma.points.col(0) = belief.mean();
    for (Index i = 0; i < n; ++i) {
        sigma.points.col(1 + i) = belief.mean() + root.col(i);
        sigma.points.col(1 + n + i) = belief.mean() - root.col(i);
    }
    sigma.mean_weights = VectorXd::Constant(2 * n + 1, 0.5 / scale);
    sigma.cov_weights = sigma.mean_weights;
    sigma.mean_weights(0) = lambda / scale;
    sigma.cov_weights(0) = lambda / scale + (1.0 - params.alpha * params.alpha + params.beta);
    return sigma;
}

MatrixXd transform_points(const SigmaPointSet& sigma, const VectorMap& fn)
{
    MatrixXd out;
    for (Index j = 0; j < sigma.size(); ++j) {
        VectorXd value = fn(sigma.points.col(j));
        if (j == 0) {
            out.resize(value.size(), sigma.size());
        } else if (value.size() != out.rows()) {
            throw DimensionError("map output dimension changed at sigma point " + std::to_string(j));
        }
        if (!value.allFinite()) {
            throw NumericalError("non-finite map output at sigma point " + std::to_string(j));
        }
        out.col(j) = value;
    }
    return out;
}

UnscentedMoments unscented_moments(const SigmaPointSet& sigma, const MatrixXd& transformed)
{
    if (transformed.cols() != sigma.size()) {
        throw DimensionError("transformed points do not match the sigma point count");
    }
    UnscentedMoments out;
    out.mu = transformed * sigma.mean_weights;
    const MatrixXd dz = transformed.colwise() - out.mu;
    const MatrixXd dx = sigma.points.colwise() - sigma.points.col(0);
    const MatrixXd weighted = dz * sigma.cov_weights.asDiagonal();
    out.U = weighted * dz.transpose();
    out.U = 0.5 * (out.U + out.U.transpose()).eval();
    out.C = dx * weighted.transpose();
    return out;
}

UnscentedMoments unscented_moments(const SigmaPointSet& sigma, const VectorMap& fn)
{
    return unscented_moments(sigma, transform_points(sigma, fn));
}

} // namespace sor
