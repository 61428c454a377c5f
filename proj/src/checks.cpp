#include "sor/checks.hpp"

#include "sor/harness.hpp"
#include "sor/sor_vb.hpp"
#include "sor/tracking_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace sor {

namespace {

using tracking::Rng;

MatrixXd random_matrix(Index rows, Index cols, Rng& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return MatrixXd::NullaryExpr(rows, cols, [&]() { return u(rng); });
}

MatrixXd random_spd(Index n, Rng& rng)
{
    std::uniform_real_distribution<double> eig(0.5, 2.0);
    const Eigen::HouseholderQR<MatrixXd> qr(random_matrix(n, n, rng));
    const MatrixXd q = qr.householderQ();
    VectorXd d(n);
    for (Index i = 0; i < n; ++i) {
        d(i) = eig(rng);
    }
    return q * d.asDiagonal() * q.transpose();
}

VectorXd random_vector(Index n, double half_width, Rng& rng)
{
    std::uniform_real_distribution<double> u(-half_width, half_width);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) {
        v(i) = u(rng);
    }
    return v;
}

CheckResult check(const std::string& name, const std::function<std::string()>& body)
{
    try {
        const std::string failure = body();
        return {name, failure.empty(), failure.empty() ? "ok" : failure};
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

} // namespace

std::vector<CheckResult> run_checks(std::uint64_t seed)
{
    std::vector<CheckResult> out;
    Rng rng = tracking::make_rng(seed, 0);

    out.push_back(check("unscented transform is exact for affine maps", [&]() -> std::string {
        for (int trial = 0; trial < 20; ++trial) {
            const GaussianBelief b(random_vector(4, 5.0, rng), random_spd(4, rng));
            const MatrixXd a = random_matrix(3, 4, rng);
            const VectorXd c = random_vector(3, 1.0, rng);
            const auto mom = unscented_moments(draw_sigma_points(b, UTParams{}),
                                               [&](const VectorXd& x) -> VectorXd { return a * x + c; });
            const double err = std::max((mom.mu - (a * b.mean() + c)).norm(),
                                        (mom.U - a * b.cov() * a.transpose()).norm());
            if (err > 1e-9) {
                return "moment error " + fmt(err);
            }
        }
        return {};
    }));

    out.push_back(check("serial and parallel updates agree", [&]() -> std::string {
        for (int trial = 0; trial < 50; ++trial) {
            NonlinearSSM model;
            model.state_dim = 3;
            model.meas_dim = 4;
            const MatrixXd h = random_matrix(4, 3, rng);
            model.process_fn = [](const VectorXd& x) { return x; };
            model.meas_fn = [h](const VectorXd& x) -> VectorXd {
                return h * x + VectorXd::Constant(4, 0.1 * std::sin(x(0)));
            };
            model.process_cov = MatrixXd::Identity(3, 3);
            model.meas_var_diag = VectorXd::Ones(4);
            const GaussianBelief prior(random_vector(3, 2.0, rng), random_spd(3, rng));
            const auto pm = predict_measurement(model, prior, UTParams{});
            const VectorXd y = random_vector(4, 3.0, rng);
            VectorXd vinv = random_vector(4, 1.0, rng).array().abs() + 0.1;
            vinv(trial % 4) = 0.0;
            const GaussianBelief par = update_parallel(prior, pm, y, vinv);
            const SerialUpdate ser = update_serial(prior, pm, y, vinv);
            const double err = std::max((par.mean() - ser.posterior.mean()).norm() / (1.0 + par.mean().norm()),
                                        (par.cov() - ser.posterior.cov()).norm() / par.cov().norm());
            if (err > 1e-8) {
                return "relative difference " + fmt(err);
            }
        }
        return {};
    }));

    out.push_back(check("omega decreases in W and increases in theta", [&]() -> std::string {
        double prev = 1.0;
        for (double w = 0.0; w < 200.0; w += 0.5) {
            const double o = omega_update(w, 1.0, 0.5, 1e-6);
            if (!(o <= prev) || o < 0.0 || o > 1.0) {
                return "not monotone in W at " + fmt(w);
            }
            prev = o;
        }
        prev = 0.0;
        for (double t = 0.01; t < 1.0; t += 0.01) {
            const double o = omega_update(5.0, 1.0, t, 1e-6);
            if (!(o >= prev)) {
                return "not monotone in theta at " + fmt(t);
            }
            prev = o;
        }
        return {};
    }));

    out.push_back(check("posterior trace does not exceed prior trace", [&]() -> std::string {
        const tracking::TurnModelConfig turn;
        const auto field = tracking::SensorField::lattice(3);
        const NonlinearSSM model = tracking::make_tracking_model(turn, field, 3.5e-3, 10.0);
        const MatrixXd p0 = 100.0 * tracking::process_noise_cov(turn);
        tracking::CorruptionConfig cc;
        cc.lambda = 0.3;
        const auto traj = tracking::simulate(turn, field, cc, tracking::reference_initial_state(), 20, rng);
        GaussianBelief belief(tracking::reference_initial_state(), p0);
        for (const auto& y : traj.measurements) {
            const GaussianBelief pred = predict(model, belief, UTParams{});
            const SorStepResult r = sor_step(model, pred, y, IndicatorConfig{}, UTParams{}, Variant::Serial);
            if (r.posterior.cov().trace() > pred.cov().trace() * (1.0 + 1e-9)) {
                return "trace grew at step " + std::to_string(y.time_index);
            }
            belief = r.posterior;
        }
        return {};
    }));

    out.push_back(check("process noise is symmetric PSD", [&]() -> std::string {
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (int trial = 0; trial < 50; ++trial) {
            const tracking::TurnModelConfig turn{0.1 + u(rng), u(rng), u(rng)};
            const MatrixXd q = tracking::process_noise_cov(turn);
            const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(q).eigenvalues().minCoeff();
            if ((q - q.transpose()).norm() > 0.0 || min_eig < -1e-12) {
                return "min eigenvalue " + fmt(min_eig);
            }
        }
        return {};
    }));

    out.push_back(check("turn transition preserves speed", [&]() -> std::string {
        for (int trial = 0; trial < 50; ++trial) {
            VectorXd x = random_vector(5, 20.0, rng);
            x(4) = 0.2 * random_vector(1, 1.0, rng)(0);
            const VectorXd next = tracking::turn_transition(x, tracking::TurnModelConfig{});
            const double diff = std::abs(std::hypot(next(1), next(3)) - std::hypot(x(1), x(3)));
            if (diff > 1e-10) {
                return "speed changed by " + fmt(diff);
            }
        }
        return {};
    }));

    out.push_back(check("sensor lattice for m = 6", []() -> std::string {
        const auto f = tracking::SensorField::lattice(3);
        const std::vector<Eigen::Vector2d> bearing{{0, 350}, {350, 0}, {700, 350}};
        const std::vector<Eigen::Vector2d> range{{0, 0}, {350, 350}, {700, 0}};
        return f.bearing == bearing && f.range == range ? std::string() : "positions differ";
    }));

    out.push_back(check("aggregate RMSE ignores run order", [&]() -> std::string {
        std::vector<PositionSeries> est(5);
        std::vector<PositionSeries> truth(5);
        for (int r = 0; r < 5; ++r) {
            for (int k = 0; k < 10; ++k) {
                est[r].push_back(random_vector(2, 5.0, rng));
                truth[r].push_back(random_vector(2, 5.0, rng));
            }
        }
        const double a = rmse_pos(est, truth).aggregate;
        std::reverse(est.begin(), est.end());
        std::reverse(truth.begin(), truth.end());
        const double b = rmse_pos(est, truth).aggregate;
        return std::abs(a - b) <= 1e-12 * a ? std::string() : "aggregate changed";
    }));

    out.push_back(check("runs replay deterministically", []() -> std::string {
        harness::ScenarioConfig cfg;
        cfg.steps = 20;
        cfg.runs = 2;
        const auto a = harness::run_point(cfg);
        const auto b = harness::run_point(cfg);
        for (std::size_t f = 0; f < a.filters.size(); ++f) {
            if (a.filters[f].per_step_rmse != b.filters[f].per_step_rmse) {
                return "filter " + std::string(to_string(a.filters[f].filter)) + " differs";
            }
        }
        return a.failures.empty() ? std::string() : "run failed: " + a.failures.front().error;
    }));

    return out;
}

} // namespace sor
