// Selective observations rejection: variational Bayes over per-dimension
// Bernoulli outlier indicators, fused with unscented Gaussian filtering.
//
// Each measurement dimension i carries an indicator I_i in {epsilon, 1} with
// prior P(I_i = 1) = theta_i. The state update uses the effective precision
// V^-1 = R^-1 diag(<I>), so a dimension whose indicator collapses to epsilon
// is effectively removed from the update. The loop alternates
//
//     W_ii  = E_q(x)[(y_i - h_i(x))^2]
//     Omega = P(I_i = 1 | ...)          (closed form, see omega_update)
//     V^-1  = R^-1 diag(Omega + (1 - Omega) epsilon)
//     (m+, P+) = Gaussian update of the prediction with V^-1
//
// until the relative change of m+ drops below tau.
#pragma once

#include "sor/gauss_filter.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sor {

enum class Variant {
    Parallel, ///< SOR: batch Woodbury update, O((m+n)^3)
    Serial,   ///< mSOR: serial scalar conditioning, O(n^2 (m+n))
};

/// Where the measurement moments mu/U/C are evaluated during VB iterations.
enum class MomentStrategy {
    FixedAtPrediction,      ///< computed once about (m-, P-)
    RelinearizeAtPosterior, ///< statistical linearization about each iterate
};

struct IndicatorConfig {
    double epsilon = 1e-6;
    VectorXd theta_prior; ///< per-dimension P(no outlier); empty means 0.5 everywhere
    double tau = 1e-4;
    int max_iters = 50;
    MomentStrategy moments = MomentStrategy::FixedAtPrediction;

    /// When set, <I> is pinned to this vector and no VB iterations run.
    /// All ones reproduces the plain Gaussian filter.
    std::optional<VectorXd> forced_expected_indicator;

    double theta(Index i) const { return theta_prior.size() == 0 ? 0.5 : theta_prior(i); }

    /// Throws std::invalid_argument unless 0 < epsilon < 1, every theta lies in
    /// (0, 1), tau >= 0 and max_iters >= 1.
    void validate(Index meas_dim) const;
};

struct IndicatorBelief {
    VectorXd omega; ///< posterior probability of "no outlier", per dimension
};

struct SorStepResult {
    GaussianBelief posterior;
    IndicatorBelief indicators;
    int iterations = 0;
    bool converged = false;
};

/// Thrown when an update fails inside the VB loop.
class VbIterationError : public NumericalError {
public:
    VbIterationError(int iteration, const std::string& what);
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// Omega = 1 / (1 + sqrt(eps) (1/theta - 1) exp(W / (2R) (1 - eps))),
/// evaluated as a logistic of the log-odds so large W underflows to 0.
double omega_update(double w, double r, double theta, double epsilon);

/// V^-1_ii = (Omega_i + (1 - Omega_i) eps) / R_ii
VectorXd effective_precision(const IndicatorBelief& indicators, const VectorXd& r_diag, double epsilon);

/// One measurement step of the filter starting from the prediction `prior`.
SorStepResult sor_step(const NonlinearSSM& model, const GaussianBelief& prior, const Measurement& y,
                       const IndicatorConfig& cfg, const UTParams& params, Variant variant);

/// Predict/update recursion over an ordered measurement sequence.
std::vector<SorStepResult> sor_filter_run(const NonlinearSSM& model, const GaussianBelief& init,
                                          const std::vector<Measurement>& measurements,
                                          const IndicatorConfig& cfg, const UTParams& params, Variant variant);

/// The filters compared by the experiment harness.
enum class FilterKind {
    Ukf,  ///< plain UKF: <I> pinned to 1, parallel update
    Sor,  ///< parallel VB variant
    Msor, ///< serial VB variant
};

FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

/// sor_filter_run with the configuration each filter kind implies.
std::vector<SorStepResult> run_filter(FilterKind kind, const NonlinearSSM& model, const GaussianBelief& init,
                                      const std::vector<Measurement>& measurements, IndicatorConfig cfg,
                                      const UTParams& params);

} // namespace sor
