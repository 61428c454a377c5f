// Config-driven Monte Carlo experiments over the tracking world: RMSE sweeps
// over lambda, gamma or the number of sensors, runtime benchmarks and the
// log-log complexity fit.
//
// Config files are JSON. Every key is optional; a "law" is either a number or
// a two-element array [lo, hi] drawn uniformly once per run.
//
//   {
//     "name": "fig2",
//     "model": "tracking",               // or "uwb"
//     "mode": "outliers",                // or "missing"
//     "lambda": 0.3,                     // law
//     "gamma": [100, 1000],              // law
//     "sigma_theta": 3.5e-3, "sigma_rho": 10,
//     "epsilon": 1e-6,                   // law
//     "theta": 0.5,                      // law, drawn per dimension
//     "tau": 1e-4, "max_iters": 50,
//     "moments": "fixed",                // or "relinearize"
//     "filters": ["ukf", "sor", "msor"],
//     "K": 1000, "runs": 100, "seed": 1, "num_sensors": 6,
//     "dt": 1, "eta1": 0.1, "eta2": 1.75e-4,
//     "sweep": {"axis": "lambda", "values": [0, 0.1, 0.2]},  // axis: none|lambda|gamma|m
//     "output": "out/fig2", "threads": 1,
//     "uwb": {"data": "path/to/scenario", "scenario": "s1", "tag_z": 0}   // tag_z defaults to the replica height or 0
//   }
#pragma once

#include "sor/metrics.hpp"
#include "sor/sor_vb.hpp"
#include "sor/tracking_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sor::harness {

using sor::rmse_pos;

enum class ModelKind { Tracking, Uwb };
enum class SweepAxis { None, Lambda, Gamma, NumSensors };

struct UwbSettings {
    std::string data_dir; ///< empty means the synthetic replica
    std::string scenario = "synthetic";
    std::optional<double> tag_z; ///< unset: replica tag height, or 0 for a dataset
};

/// Tag height used for the measurement model.
double tag_height(const UwbSettings& s);

struct ScenarioConfig {
    std::string name = "scenario";
    ModelKind model = ModelKind::Tracking;
    tracking::CorruptionMode mode = tracking::CorruptionMode::Outliers;
    tracking::Law lambda = tracking::Law::fixed(0.3);
    tracking::Law gamma = tracking::Law::uniform(100.0, 1000.0);
    double sigma_theta = 3.5e-3;
    double sigma_rho = 10.0;
    tracking::Law epsilon = tracking::Law::fixed(1e-6);
    tracking::Law theta = tracking::Law::fixed(0.5);
    double tau = 1e-4;
    int max_iters = 50;
    MomentStrategy moments = MomentStrategy::FixedAtPrediction;
    std::vector<FilterKind> filters{FilterKind::Ukf, FilterKind::Sor, FilterKind::Msor};
    long steps = 1000;
    int runs = 100;
    std::uint64_t seed = 1;
    int num_sensors = 6;
    tracking::TurnModelConfig turn;
    UTParams ut;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;
    std::string output;
    int threads = 1;
    UwbSettings uwb;

    /// Throws std::invalid_argument on runs < 1, K < 1, an odd or
    /// non-positive sensor count, an empty filter list, or a sweep axis
    /// without values.
    void validate() const;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string to_string(SweepAxis axis);

/// Copy of `cfg` with the sweep axis pinned to `value` and the axis cleared.
ScenarioConfig at_sweep_value(const ScenarioConfig& cfg, double value);

struct RunFailure {
    std::uint64_t seed = 0;
    FilterKind filter = FilterKind::Ukf;
    std::string error;
};

struct FilterSeries {
    FilterKind filter = FilterKind::Ukf;
    std::vector<double> per_step_rmse;
    double aggregate_rmse = 0.0;
    std::vector<std::uint64_t> run_seeds;  ///< successful runs only
    std::vector<double> run_rmse;          ///< per-run aggregate RMSE_pos
    std::vector<double> run_runtime_s;     ///< per-run filter wall clock
    std::vector<double> run_mean_iterations;

    double median_rmse() const;
    double mean_runtime_s() const;
    double mean_iterations() const;
};

struct SweepPoint {
    SweepAxis axis = SweepAxis::None;
    double value = 0.0;
    std::vector<FilterSeries> filters;
    std::vector<RunFailure> failures;

    const FilterSeries& series(FilterKind kind) const;
};

struct RunReport {
    std::string name;
    std::vector<SweepPoint> points;

    bool ok() const;
};

/// All Monte Carlo runs of a single configuration (no sweep). Run r uses seed
/// cfg.seed + r: the trajectory, the filter initialization m0 ~ N(x0, 100 Q)
/// and the drawn indicator parameters come from independent streams of it,
/// and every filter sees the same draws.
SweepPoint run_point(const ScenarioConfig& cfg);

/// Runs every sweep point. When cfg.output is set, writes one CSV per point
/// (filter,step,rmse) and summary.json into that directory.
RunReport run_sweep(const ScenarioConfig& cfg);

std::string point_csv_name(const SweepPoint& point);
void write_point_csv(std::ostream& os, const SweepPoint& point);
std::string summary_json(const ScenarioConfig& cfg, const RunReport& report);
void write_report(const std::filesystem::path& dir, const ScenarioConfig& cfg, const RunReport& report);

/// Runtime per filter per sensor count, with the log-log slope per filter.
struct BenchResult {
    std::vector<double> num_sensors;
    std::vector<FilterKind> filters;
    std::vector<std::vector<double>> mean_runtime_s; ///< [filter][point]
    std::vector<double> slopes;                      ///< per filter
    std::vector<RunFailure> failures;
};

/// Sweeps the number of sensors over cfg.values (axis forced to m).
BenchResult run_bench(const ScenarioConfig& cfg);
void write_bench_csv(std::ostream& os, const BenchResult& bench);

/// Ordinary least-squares slope of log(t) against log(m). Throws
/// std::invalid_argument with fewer than 3 points or non-positive values.
double complexity_fit(const std::vector<double>& m, const std::vector<double>& runtime);

double median(std::vector<double> values);

} // namespace sor::harness
