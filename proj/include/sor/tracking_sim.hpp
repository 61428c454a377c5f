// Target tracking world: coordinated-turn dynamics observed by a lattice of
// bearing and range sensors, with Gaussian-mixture outliers or missing data.
#pragma once

#include "sor/core_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace sor::tracking {

using Rng = std::mt19937_64;

/// Builds a generator for an independent stream of a run. Distinct
/// (seed, stream) pairs give unrelated sequences.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// A scalar that is either fixed or drawn uniformly from [lo, hi].
struct Law {
    double lo = 0.0;
    double hi = 0.0;

    static Law fixed(double v) { return {v, v}; }
    static Law uniform(double lo, double hi) { return {lo, hi}; }
    bool is_fixed() const { return lo == hi; }
    double draw(Rng& rng) const;
};

struct TurnModelConfig {
    double dt = 1.0;
    double eta1 = 0.1;
    double eta2 = 1.75e-4;
};

/// State layout [a, a_dot, b, b_dot, omega].
constexpr Index kStateDim = 5;

/// [-10000, 10, 5000, -5, -0.0524]
VectorXd reference_initial_state();

/// Coordinated-turn transition; falls back to the constant-velocity limit for
/// |omega| < 1e-9.
VectorXd turn_transition(const VectorXd& state, const TurnModelConfig& cfg);

/// blockdiag(eta1 M, eta1 M, eta2) with M = [[dt^3/3, dt^2/2], [dt^2/2, dt]].
MatrixXd process_noise_cov(const TurnModelConfig& cfg);

struct SensorField {
    std::vector<Eigen::Vector2d> bearing;
    std::vector<Eigen::Vector2d> range;

    /// Bearing sensor j at (350 (j-1), 350 (j mod 2)), range sensor j at
    /// (350 (j-1), 350 ((j-1) mod 2)), j = 1..num_pairs.
    static SensorField lattice(int num_pairs);

    Index meas_dim() const { return static_cast<Index>(bearing.size() + range.size()); }
};

/// Noise-free readings: bearings (rad) first, then ranges (m). Throws
/// std::domain_error when the target coincides with a bearing sensor.
VectorXd clean_measurement(const VectorXd& state, const SensorField& field);

/// The filter-side measurement map; same as clean_measurement but total.
VectorXd measurement_map(const VectorXd& state, const SensorField& field);

enum class CorruptionMode { Outliers, Missing };

struct CorruptionConfig {
    CorruptionMode mode = CorruptionMode::Outliers;
    double lambda = 0.0;
    Law gamma = Law::uniform(100.0, 1000.0);
    double sigma_theta = 3.5e-3;
    double sigma_rho = 10.0;
};

struct CorruptedMeasurement {
    VectorXd values;
    std::vector<bool> corrupted;
};

/// Adds noise dimension-wise. Outliers: variance gamma sigma^2 with
/// probability lambda, else sigma^2. Missing: the reading is replaced by 0.0
/// with probability lambda, else nominal noise is added. The first half of
/// `clean` are bearings and the second half ranges.
CorruptedMeasurement corrupt(const VectorXd& clean, const CorruptionConfig& cfg, double gamma, Rng& rng);

/// Model seen by the filters: turn dynamics, lattice measurements, nominal R
/// and the bearing dimensions flagged as angular.
NonlinearSSM make_tracking_model(const TurnModelConfig& turn, const SensorField& field, double sigma_theta,
                                 double sigma_rho);

struct Trajectory {
    std::vector<VectorXd> states; ///< x_0 .. x_K
    std::vector<Measurement> measurements; ///< y_1 .. y_K
    std::vector<std::vector<bool>> corrupted;
    double gamma = 1.0;
};

/// Simulates K steps from x0. gamma is drawn once per trajectory from cfg.gamma.
Trajectory simulate(const TurnModelConfig& turn, const SensorField& field, const CorruptionConfig& cfg,
                    const VectorXd& x0, long steps, Rng& rng);

/// CSV with columns k, five state columns, one y column per dimension and one
/// 0/1 corruption flag per dimension.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace sor::tracking
