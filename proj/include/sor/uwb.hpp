// UWB range-only indoor localization: dataset ingestion, the random-walk /
// 3D-range model and a Monte Carlo runner over random filter initializations.
//
// Dataset layout (one directory per scenario):
//
//   anchors.csv   id,x,y,z
//   steps.csv     step,truth_x,truth_y,<anchor id>,<anchor id>,...
//
// A blank range cell means no reading from that anchor at that step.
#pragma once

#include "sor/core_model.hpp"
#include "sor/metrics.hpp"
#include "sor/sor_vb.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sor::uwb {

struct Anchor {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct AnchorSet {
    std::vector<Anchor> anchors;

    std::size_t size() const { return anchors.size(); }
    std::optional<std::size_t> index_of(int id) const;
};

struct StepRecord {
    long step_index = 0;
    Eigen::Vector2d truth = Eigen::Vector2d::Zero();
    std::vector<std::optional<double>> ranges; ///< aligned with AnchorSet order
};

struct Dataset {
    AnchorSet anchors;
    std::vector<StepRecord> steps;
};

/// Parse failure; `line()` is 1-based within `file()`, 0 when not line-specific.
class DatasetError : public std::runtime_error {
public:
    DatasetError(std::string file, std::size_t line, const std::string& what);
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

Dataset parse_dataset(std::istream& anchors_csv, std::istream& steps_csv, int max_readings = 4);
Dataset load_dataset(const std::filesystem::path& dir, int max_readings = 4);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Random walk over 2D position (f = identity, Q = q_var I) observed by one
/// range per anchor, h_i(x) = |(x1 - x_i, x2 - y_i, tag_z - z_i)|, R = r_var I.
NonlinearSSM uwb_measurement_model(const AnchorSet& anchors, double tag_z, double q_var = 0.1,
                                   double r_var = 0.1);

/// Full-length measurement vectors with absent readings encoded as 0.0.
std::vector<Measurement> encode_measurements(const Dataset& dataset);

struct LocalizationConfig {
    std::string scenario = "scenario";
    double tag_z = 0.0;
    int runs = 100;
    std::uint64_t seed = 1;
    Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
    double init_var = 0.5;
    double q_var = 0.1;
    double r_var = 0.1;
    IndicatorConfig indicator;
    UTParams ut;
};

struct LocalizationRun {
    PositionSeries track;
    std::vector<VectorXd> omega;
    std::vector<int> iterations;
    double runtime_s = 0.0;
};

struct LocalizationReport {
    std::string scenario;
    std::string variant;
    double rmse_m = 0.0;
    double mean_runtime_s = 0.0;
    long steps = 0;
    int runs = 0;
    std::vector<double> per_step_rmse;
    /// Fraction of (run, step) pairs where every anchor without a reading has
    /// Omega < 0.01. NaN when no step has an absent anchor.
    double absent_rejection_rate = 0.0;
    std::vector<LocalizationRun> run_details;
};

/// Runs `cfg.runs` filters from m0 ~ N(x0, init_var I), P0 = init_var I.
LocalizationReport run_localization(const Dataset& dataset, const LocalizationConfig& cfg, FilterKind kind);

/// JSON object {scenario, variant, rmse_m, mean_runtime_s, steps}.
std::string report_json(const LocalizationReport& report);

/// Parameters of a synthetic corridor replica of the experimental layout.
struct ReplicaConfig {
    int num_anchors = 11;
    int max_readings = 4;
    double corridor_length = 30.0;
    double corridor_width = 3.0;
    double anchor_z_low = 2.0;
    double anchor_z_high = 2.6;
    double tag_z = 1.0;
    double step_length = 0.3;
    double noise_sd = 0.05;
    double nlos_prob = 0.05;
    double nlos_bias_low = 0.3;
    double nlos_bias_high = 1.5;
    std::uint64_t seed = 7;
};

/// Tag walking a lap of the corridor from the origin; at each step only the
/// `max_readings` closest anchors report, with Gaussian noise and occasional
/// positive NLoS bias.
Dataset synthetic_replica(const ReplicaConfig& cfg);

} // namespace sor::uwb
