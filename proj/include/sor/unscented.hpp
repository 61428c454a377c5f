// Scaled unscented transform: sigma points and transformed moments.
#pragma once

#include "sor/core_model.hpp"

namespace sor {

/// Scaling parameters of the unscented transform.
struct UTParams {
    double alpha = 1.0;
    double beta = 2.0;
    double kappa = 0.0;

    /// lambda = alpha^2 (n + kappa) - n
    double lambda(Index n) const
    {
        const double nd = static_cast<double>(n);
        return alpha * alpha * (nd + kappa) - nd;
    }

    /// Throws std::invalid_argument if the parameters are out of range for a
    /// state of dimension n.
    void validate(Index n) const;
};

/// 2n+1 weighted sigma points stored column-wise. Column 0 is the generating
/// mean.
struct SigmaPointSet {
    MatrixXd points;
    VectorXd mean_weights;
    VectorXd cov_weights;

    Index size() const { return points.cols(); }
    Index dim() const { return points.rows(); }
    auto center() const { return points.col(0); }
};

SigmaPointSet draw_sigma_points(const GaussianBelief& belief, const UTParams& params);

/// Evaluates `fn` at every sigma point; the output is one column per point.
/// Throws NumericalError naming the sigma point index on non-finite output.
MatrixXd transform_points(const SigmaPointSet& sigma, const VectorMap& fn);

struct UnscentedMoments {
    VectorXd mu; // E[fn(x)]
    MatrixXd U;  // Cov[fn(x)]
    MatrixXd C;  // Cov[x, fn(x)], n x (output dim)
};

UnscentedMoments unscented_moments(const SigmaPointSet& sigma, const VectorMap& fn);

/// Moments from points that were already pushed through the map.
UnscentedMoments unscented_moments(const SigmaPointSet& sigma, const MatrixXd& transformed);

} // namespace sor
