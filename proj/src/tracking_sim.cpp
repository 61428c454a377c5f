#include "sor/tracking_sim.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sor::tracking {

Rng make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
    return Rng(seq);
}

double Law::draw(Rng& rng) const
{
    if (is_fixed()) {
        return lo;
    }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

VectorXd reference_initial_state()
{
    VectorXd x(kStateDim);
    x << -10000.0, 10.0, 5000.0, -5.0, -0.0524;
    return x;
}

VectorXd turn_transition(const VectorXd& s, const TurnModelConfig& cfg)
{
    if (s.size() != kStateDim) {
        throw DimensionError("turn state must have 5 entries");
    }
    const double w = s(4);
    const double wt = w * cfg.dt;
    const double c = std::cos(wt);
    const double sn = std::sin(wt);
    double sin_over_w = cfg.dt;
    double one_minus_cos_over_w = 0.0;
    if (std::abs(w) >= 1e-9) {
        sin_over_w = sn / w;
        one_minus_cos_over_w = (1.0 - c) / w;
    }
    VectorXd out(kStateDim);
    out(0) = s(0) + sin_over_w * s(1) - one_minus_cos_over_w * s(3);
    out(1) = c * s(1) - sn * s(3);
    out(2) = s(2) + one_minus_cos_over_w * s(1) + sin_over_w * s(3);
    out(3) = sn * s(1) + c * s(3);
    out(4) = w;
    return out;
}

MatrixXd process_noise_cov(const TurnModelConfig& cfg)
{
    const double dt = cfg.dt;
    Eigen::Matrix2d block;
    block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
    MatrixXd q = MatrixXd::Zero(kStateDim, kStateDim);
    q.block<2, 2>(0, 0) = cfg.eta1 * block;
    q.block<2, 2>(2, 2) = cfg.eta1 * block;
    q(4, 4) = cfg.eta2;
    return q;
}

SensorField SensorField::lattice(int num_pairs)
{
    if (num_pairs < 1) {
        throw std::invalid_argument("sensor field needs at least one bearing/range pair");
    }
    SensorField field;
    for (int j = 1; j <= num_pairs; ++j) {
        const double a = 350.0 * (j - 1);
        field.bearing.emplace_back(a, 350.0 * (j % 2));
        field.range.emplace_back(a, 350.0 * ((j - 1) % 2));
    }
    return field;
}

VectorXd measurement_map(const VectorXd& state, const SensorField& field)
{
    const double a = state(0);
    const double b = state(2);
    VectorXd y(field.meas_dim());
    Index i = 0;
    for (const auto& p : field.bearing) {
        y(i++) = std::atan2(b - p.y(), a - p.x());
    }
    for (const auto& p : field.range) {
        y(i++) = std::hypot(a - p.x(), b - p.y());
    }
    return y;
}

VectorXd clean_measurement(const VectorXd& state, const SensorField& field)
{
    for (std::size_t j = 0; j < field.bearing.size(); ++j) {
        if (state(0) == field.bearing[j].x() && state(2) == field.bearing[j].y()) {
            throw std::domain_error("target coincides with bearing sensor " + std::to_string(j + 1));
        }
    }
    return measurement_map(state, field);
}

CorruptedMeasurement corrupt(const VectorXd& clean, const CorruptionConfig& cfg, double gamma, Rng& rng)
{
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1]");
    }
    const Index m = clean.size();
    const Index half = m / 2;
    std::bernoulli_distribution hit(cfg.lambda);
    std::normal_distribution<double> unit(0.0, 1.0);

    CorruptedMeasurement out{clean, std::vector<bool>(static_cast<std::size_t>(m), false)};
    for (Index i = 0; i < m; ++i) {
        const double sigma = i < half ? cfg.sigma_theta : cfg.sigma_rho;
        const bool corrupted = hit(rng);
        out.corrupted[static_cast<std::size_t>(i)] = corrupted;
        if (cfg.mode == CorruptionMode::Missing && corrupted) {
            out.values(i) = 0.0;
            continue;
        }
        const double scale = (cfg.mode == CorruptionMode::Outliers && corrupted) ? std::sqrt(gamma) * sigma : sigma;
        out.values(i) += scale * unit(rng);
    }
    return out;
}

NonlinearSSM make_tracking_model(const TurnModelConfig& turn, const SensorField& field, double sigma_theta,
                                 double sigma_rho)
{
    NonlinearSSM model;
    model.state_dim = kStateDim;
    model.meas_dim = field.meas_dim();
    model.process_fn = [turn](const VectorXd& x) { return turn_transition(x, turn); };
    model.meas_fn = [field](const VectorXd& x) { return measurement_map(x, field); };
    model.process_cov = process_noise_cov(turn);
    model.meas_var_diag.resize(model.meas_dim);
    const Index nb = static_cast<Index>(field.bearing.size());
    model.meas_var_diag.head(nb).setConstant(sigma_theta * sigma_theta);
    model.meas_var_diag.tail(model.meas_dim - nb).setConstant(sigma_rho * sigma_rho);
    model.angular_dims.assign(static_cast<std::size_t>(model.meas_dim), false);
    for (Index i = 0; i < nb; ++i) {
        model.angular_dims[static_cast<std::size_t>(i)] = true;
    }
    return model;
}

Trajectory simulate(const TurnModelConfig& turn, const SensorField& field, const CorruptionConfig& cfg,
                    const VectorXd& x0, long steps, Rng& rng)
{
    Trajectory traj;
    traj.gamma = cfg.gamma.draw(rng);
    if (cfg.mode == CorruptionMode::Outliers && !(traj.gamma >= 1.0)) {
        throw std::invalid_argument("gamma must be at least 1");
    }

    // Q may be singular (eta1 = 0); use a symmetric square root.
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(process_noise_cov(turn));
    const MatrixXd q_root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    std::normal_distribution<double> unit(0.0, 1.0);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.push_back(x0);
    for (long k = 1; k <= steps; ++k) {
        VectorXd noise(kStateDim);
        for (Index i = 0; i < kStateDim; ++i) {
            noise(i) = unit(rng);
        }
        traj.states.push_back(turn_transition(traj.states.back(), turn) + q_root * noise);
        CorruptedMeasurement y = corrupt(clean_measurement(traj.states.back(), field), cfg, traj.gamma, rng);
        traj.measurements.push_back(Measurement{k, std::move(y.values)});
        traj.corrupted.push_back(std::move(y.corrupted));
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const Index m = traj.measurements.empty() ? 0 : traj.measurements.front().values.size();
    os << "k,a,a_dot,b,b_dot,omega";
    for (Index i = 0; i < m; ++i) {
        os << ",y" << i + 1;
    }
    for (Index i = 0; i < m; ++i) {
        os << ",flag" << i + 1;
    }
    os << '\n' << std::setprecision(17);
    for (std::size_t k = 0; k < traj.measurements.size(); ++k) {
        os << traj.measurements[k].time_index;
        const VectorXd& x = traj.states[k + 1];
        for (Index i = 0; i < x.size(); ++i) {
            os << ',' << x(i);
        }
        for (Index i = 0; i < m; ++i) {
            os << ',' << traj.measurements[k].values(i);
        }
        for (Index i = 0; i < m; ++i) {
            os << ',' << (traj.corrupted[k][static_cast<std::size_t>(i)] ? 1 : 0);
        }
        os << '\n';
    }
}

} // namespace sor::tracking
