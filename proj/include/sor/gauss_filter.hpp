// General Gaussian filter steps on top of the unscented transform.
//
// The measurement update takes a diagonal *effective precision* V^-1 rather
// than a noise covariance, so that a dimension can be switched off by letting
// its precision go to zero without ever forming the (huge) variance.
#pragma once

#include "sor/core_model.hpp"
#include "sor/unscented.hpp"

#include <optional>

namespace sor {

/// Low-rank factorization of the joint (state, measurement) covariance:
///
///     [[P, C], [C^T, U]] = [X; Z] * core * [X; Z]^T
///
/// For moments produced by the unscented transform, X and Z are the
/// sigma-point deviations and core = diag(cov_weights). Conditioning on one
/// scalar measurement then only touches the L x L core.
struct JointFactor {
    MatrixXd state_dev; // n x L
    MatrixXd meas_dev;  // m x L
    MatrixXd core;      // L x L, symmetric
};

/// Moments of h(x) under the predicted state belief.
struct PredictedMeasurement {
    VectorXd mu; // m
    MatrixXd U;  // m x m; empty when only the factor was computed
    MatrixXd C;  // n x m
    std::optional<JointFactor> factor;

    bool has_dense_cov() const { return U.size() > 0; }
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// y - mu with angular dimensions wrapped. `angular` may be empty.
VectorXd innovation(const VectorXd& y, const VectorXd& mu, const std::vector<bool>& angular);

/// Time update: UT of the process map plus Q(k).
GaussianBelief predict(const NonlinearSSM& model, const GaussianBelief& posterior, const UTParams& params,
                       long k = 1);

/// UT of the measurement map about `belief`. When `dense` is false the m x m
/// covariance U is skipped and only mu, C and the joint factor are produced,
/// keeping the cost linear in m.
PredictedMeasurement predict_measurement(const NonlinearSSM& model, const GaussianBelief& belief,
                                         const UTParams& params, bool dense = true);

/// Statistical linear regression of h about `iterate`, re-expressed as
/// moments under `prior`: h(x) ~ H x + b + e with Cov[e] taken from the
/// regression residual. Coincides with predict_measurement(prior) for affine h.
PredictedMeasurement relinearized_measurement(const NonlinearSSM& model, const GaussianBelief& prior,
                                              const GaussianBelief& iterate, const UTParams& params,
                                              bool dense = true);

/// Parallel (batch) update with gain
///     K = C (V^-1 - V^-1 (I + U V^-1)^-1 U V^-1),
///     m+ = m- + K (y - mu),  P+ = P- - C K^T.
/// `vinv_diag` entries must be finite and >= 0. Requires a dense U.
GaussianBelief update_parallel(const GaussianBelief& predicted, const PredictedMeasurement& predmeas,
                               const VectorXd& y, const VectorXd& vinv_diag,
                               const std::vector<bool>& angular = {});

/// Result of serial conditioning: the state posterior plus the conditioned
/// moments of the predicted measurement.
struct SerialUpdate {
    GaussianBelief posterior;
    VectorXd meas_mean;
    VectorXd meas_var;
};

/// Serial scalar conditioning of the joint Gaussian over (x, h(x)) on each
/// y_i with noise 1 / vinv_diag[i]; a zero precision skips the dimension.
/// Equal to update_parallel in exact arithmetic. Uses the joint factor when
/// present (cost O(m L^2)), otherwise factors the dense joint covariance.
SerialUpdate update_serial(const GaussianBelief& predicted, const PredictedMeasurement& predmeas,
                           const VectorXd& y, const VectorXd& vinv_diag,
                           const std::vector<bool>& angular = {});

/// Per-dimension mean and variance of h(x) under the current state iterate.
struct MeasurementMarginals {
    VectorXd mean;
    VectorXd var;
};

/// Before any conditioning: mu and diag(U).
MeasurementMarginals posterior_predictive_meas(const PredictedMeasurement& predmeas);

/// Serial path: the jointly conditioned measurement moments.
MeasurementMarginals posterior_predictive_meas(const SerialUpdate& update);

/// Parallel path: a fresh UT of h about the posterior iterate (diagonal only).
MeasurementMarginals posterior_predictive_meas(const NonlinearSSM& model, const GaussianBelief& posterior,
                                               const UTParams& params);

} // namespace sor
