#include "sor/sor_vb.hpp"

#include <cmath>
#include <string>

namespace sor {

void IndicatorConfig::validate(Index meas_dim) const
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (theta_prior.size() != 0) {
        if (theta_prior.size() != meas_dim) {
            throw std::invalid_argument("theta_prior must have one entry per measurement dimension");
        }
        if (!((theta_prior.array() > 0.0).all() && (theta_prior.array() < 1.0).all())) {
            throw std::invalid_argument("theta_prior entries must lie in (0, 1)");
        }
    }
    if (!(tau >= 0.0)) {
        throw std::invalid_argument("tau must be non-negative");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (forced_expected_indicator && forced_expected_indicator->size() != meas_dim) {
        throw std::invalid_argument("forced_expected_indicator must have one entry per measurement dimension");
    }
}

VbIterationError::VbIterationError(int iteration, const std::string& what)
    : NumericalError("VB iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration)
{
}

double omega_update(double w, double r, double theta, double epsilon)
{
    const double log_odds =
        0.5 * std::log(epsilon) + std::log((1.0 - theta) / theta) + w / (2.0 * r) * (1.0 - epsilon);
    if (log_odds >= 0.0) {
        const double t = std::exp(-log_odds);
        return t / (1.0 + t);
    }
    return 1.0 / (1.0 + std::exp(log_odds));
}

VectorXd effective_precision(const IndicatorBelief& indicators, const VectorXd& r_diag, double epsilon)
{
    if (indicators.omega.size() != r_diag.size()) {
        throw DimensionError("omega and R sizes differ");
    }
    const auto& omega = indicators.omega.array();
    return ((omega + (1.0 - omega) * epsilon) / r_diag.array()).matrix();
}

namespace {

struct Iterate {
    GaussianBelief posterior;
    std::optional<SerialUpdate> serial;
};

double mean_change(const VectorXd& next, const VectorXd& prev)
{
    const double base = prev.norm();
    const double diff = (next - prev).norm();
    return base < 1e-12 ? diff : diff / base;
}

} // namespace

SorStepResult sor_step(const NonlinearSSM& model, const GaussianBelief& prior, const Measurement& y,
                       const IndicatorConfig& cfg, const UTParams& params, Variant variant)
{
    const Index m = model.meas_dim;
    cfg.validate(m);
    if (y.values.size() != m) {
        throw DimensionError("measurement size differs from meas_dim");
    }
    const VectorXd r = model.meas_var_for(y.time_index);
    if (r.size() != m || !(r.array() > 0.0).all()) {
        throw std::invalid_argument("meas_var_diag must be strictly positive");
    }
    const bool serial = variant == Variant::Serial;
    const auto& angular = model.angular_dims;

    auto update = [&](const PredictedMeasurement& pm, const VectorXd& vinv, int iteration) -> Iterate {
        try {
            if (serial) {
                SerialUpdate su = update_serial(prior, pm, y.values, vinv, angular);
                GaussianBelief post = su.posterior;
                return Iterate{std::move(post), std::move(su)};
            }
            return Iterate{update_parallel(prior, pm, y.values, vinv, angular), std::nullopt};
        } catch (const NumericalError& e) {
            throw VbIterationError(iteration, e.what());
        }
    };

    const PredictedMeasurement predicted = predict_measurement(model, prior, params, !serial);

    if (cfg.forced_expected_indicator) {
        const VectorXd& forced = *cfg.forced_expected_indicator;
        Iterate it = update(predicted, (forced.array() / r.array()).matrix(), 0);
        IndicatorBelief ind{((forced.array() - cfg.epsilon) / (1.0 - cfg.epsilon)).cwiseMax(0.0).cwiseMin(1.0)};
        return SorStepResult{std::move(it.posterior), std::move(ind), 0, true};
    }

    // Iteration 0: plain update with V^-1 = R^-1.
    Iterate current = update(predicted, r.cwiseInverse(), 0);
    IndicatorBelief indicators{VectorXd::Ones(m)};
    int iterations = 0;
    bool converged = false;

    for (int l = 1; l <= cfg.max_iters; ++l) {
        const MeasurementMarginals marg = [&] {
            try {
                return serial ? posterior_predictive_meas(*current.serial)
                              : posterior_predictive_meas(model, current.posterior, params);
            } catch (const NumericalError& e) {
                throw VbIterationError(l, e.what());
            }
        }();
        const VectorXd resid = innovation(y.values, marg.mean, angular);
        for (Index i = 0; i < m; ++i) {
            const double w = resid(i) * resid(i) + marg.var(i);
            indicators.omega(i) = omega_update(w, r(i), cfg.theta(i), cfg.epsilon);
        }
        const VectorXd vinv = effective_precision(indicators, r, cfg.epsilon);

        Iterate next = [&] {
            if (cfg.moments == MomentStrategy::RelinearizeAtPosterior) {
                const PredictedMeasurement relin = [&] {
                    try {
                        return relinearized_measurement(model, prior, current.posterior, params, !serial);
                    } catch (const NumericalError& e) {
                        throw VbIterationError(l, e.what());
                    }
                }();
                return update(relin, vinv, l);
            }
            return update(predicted, vinv, l);
        }();

        const double delta = mean_change(next.posterior.mean(), current.posterior.mean());
        current = std::move(next);
        iterations = l;
        if (delta <= cfg.tau) {
            converged = true;
            break;
        }
    }
    return SorStepResult{std::move(current.posterior), std::move(indicators), iterations, converged};
}

std::vector<SorStepResult> sor_filter_run(const NonlinearSSM& model, const GaussianBelief& init,
                                          const std::vector<Measurement>& measurements,
                                          const IndicatorConfig& cfg, const UTParams& params, Variant variant)
{
    std::vector<SorStepResult> out;
    out.reserve(measurements.size());
    GaussianBelief belief = init;
    long last_index = 0;
    for (const Measurement& y : measurements) {
        if (y.time_index <= last_index) {
            throw std::invalid_argument("measurements must be ordered by increasing time_index");
        }
        last_index = y.time_index;
        const GaussianBelief predicted = predict(model, belief, params, y.time_index);
        out.push_back(sor_step(model, predicted, y, cfg, params, variant));
        belief = out.back().posterior;
    }
    return out;
}

FilterKind parse_filter_kind(std::string_view name)
{
    if (name == "ukf") {
        return FilterKind::Ukf;
    }
    if (name == "sor") {
        return FilterKind::Sor;
    }
    if (name == "msor") {
        return FilterKind::Msor;
    }
    throw std::invalid_argument("unknown filter '" + std::string(name) + "' (expected ukf, sor or msor)");
}

std::string_view to_string(FilterKind kind)
{
    switch (kind) {
    case FilterKind::Ukf:
        return "ukf";
    case FilterKind::Sor:
        return "sor";
    case FilterKind::Msor:
        return "msor";
    }
    return "?";
}

std::vector<SorStepResult> run_filter(FilterKind kind, const NonlinearSSM& model, const GaussianBelief& init,
                                      const std::vector<Measurement>& measurements, IndicatorConfig cfg,
                                      const UTParams& params)
{
    if (kind == FilterKind::Ukf) {
        cfg.forced_expected_indicator = VectorXd::Ones(model.meas_dim);
        return sor_filter_run(model, init, measurements, cfg, params, Variant::Parallel);
    }
    return sor_filter_run(model, init, measurements, cfg, params,
                          kind == FilterKind::Sor ? Variant::Parallel : Variant::Serial);
}

} // namespace sor
