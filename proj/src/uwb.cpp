#include "sor/uwb.hpp"

#include "sor/tracking_sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace sor::uwb {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

template <typename T>
T parse_number(const std::string& cell, const std::string& file, std::size_t line, const char* what)
{
    T value{};
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw DatasetError(file, line, std::string("cannot parse ") + what + " '" + cell + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw DatasetError(file, line, std::string(what) + " is not finite");
        }
    }
    return value;
}

bool next_data_line(std::istream& is, std::string& line, std::size_t& line_no)
{
    while (std::getline(is, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            return true;
        }
    }
    return false;
}

} // namespace

std::optional<std::size_t> AnchorSet::index_of(int id) const
{
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

DatasetError::DatasetError(std::string file, std::size_t line, const std::string& what)
    : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(std::move(file)), line_(line)
{
}

Dataset parse_dataset(std::istream& anchors_csv, std::istream& steps_csv, int max_readings)
{
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;

    const std::string af = "anchors.csv";
    if (!next_data_line(anchors_csv, line, line_no)) {
        throw DatasetError(af, 0, "empty file");
    }
    if (split_row(line) != std::vector<std::string>{"id", "x", "y", "z"}) {
        throw DatasetError(af, line_no, "expected header id,x,y,z");
    }
    while (next_data_line(anchors_csv, line, line_no)) {
        const auto cells = split_row(line);
        if (cells.size() != 4) {
            throw DatasetError(af, line_no, "expected 4 columns, got " + std::to_string(cells.size()));
        }
        Anchor a;
        a.id = parse_number<int>(cells[0], af, line_no, "anchor id");
        a.x = parse_number<double>(cells[1], af, line_no, "x");
        a.y = parse_number<double>(cells[2], af, line_no, "y");
        a.z = parse_number<double>(cells[3], af, line_no, "z");
        if (ds.anchors.index_of(a.id)) {
            throw DatasetError(af, line_no, "duplicate anchor id " + cells[0]);
        }
        ds.anchors.anchors.push_back(a);
    }
    if (ds.anchors.size() == 0) {
        throw DatasetError(af, 0, "no anchors");
    }

    const std::string sf = "steps.csv";
    line_no = 0;
    if (!next_data_line(steps_csv, line, line_no)) {
        throw DatasetError(sf, 0, "empty file");
    }
    const auto header = split_row(line);
    if (header.size() < 3 || header[0] != "step" || header[1] != "truth_x" || header[2] != "truth_y") {
        throw DatasetError(sf, line_no, "expected header step,truth_x,truth_y,<anchor ids>");
    }
    std::vector<std::size_t> column_anchor;
    for (std::size_t c = 3; c < header.size(); ++c) {
        const int id = parse_number<int>(header[c], sf, line_no, "anchor id column");
        const auto idx = ds.anchors.index_of(id);
        if (!idx) {
            throw DatasetError(sf, line_no, "unknown anchor id " + header[c]);
        }
        column_anchor.push_back(*idx);
    }

    while (next_data_line(steps_csv, line, line_no)) {
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw DatasetError(sf, line_no,
                               "expected " + std::to_string(header.size()) + " columns, got " +
                                   std::to_string(cells.size()));
        }
        StepRecord rec;
        rec.step_index = parse_number<long>(cells[0], sf, line_no, "step");
        rec.truth = {parse_number<double>(cells[1], sf, line_no, "truth_x"),
                     parse_number<double>(cells[2], sf, line_no, "truth_y")};
        rec.ranges.assign(ds.anchors.size(), std::nullopt);
        int present = 0;
        for (std::size_t c = 3; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                continue;
            }
            const double range = parse_number<double>(cells[c], sf, line_no, "range");
            if (range < 0.0) {
                throw DatasetError(sf, line_no, "negative range " + cells[c] + " for anchor " + header[c]);
            }
            rec.ranges[column_anchor[c - 3]] = range;
            ++present;
        }
        if (present > max_readings) {
            throw DatasetError(sf, line_no,
                               std::to_string(present) + " readings exceed the limit of " +
                                   std::to_string(max_readings));
        }
        if (!ds.steps.empty() && rec.step_index <= ds.steps.back().step_index) {
            throw DatasetError(sf, line_no, "step indices must increase");
        }
        ds.steps.push_back(std::move(rec));
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& dir, int max_readings)
{
    std::ifstream anchors(dir / "anchors.csv");
    if (!anchors) {
        throw DatasetError((dir / "anchors.csv").string(), 0, "cannot open");
    }
    std::ifstream steps(dir / "steps.csv");
    if (!steps) {
        throw DatasetError((dir / "steps.csv").string(), 0, "cannot open");
    }
    return parse_dataset(anchors, steps, max_readings);
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds)
{
    std::filesystem::create_directories(dir);
    std::ofstream anchors(dir / "anchors.csv");
    anchors << std::setprecision(17) << "id,x,y,z\n";
    for (const auto& a : ds.anchors.anchors) {
        anchors << a.id << ',' << a.x << ',' << a.y << ',' << a.z << '\n';
    }
    std::ofstream steps(dir / "steps.csv");
    steps << std::setprecision(17) << "step,truth_x,truth_y";
    for (const auto& a : ds.anchors.anchors) {
        steps << ',' << a.id;
    }
    steps << '\n';
    for (const auto& rec : ds.steps) {
        steps << rec.step_index << ',' << rec.truth.x() << ',' << rec.truth.y();
        for (const auto& r : rec.ranges) {
            steps << ',';
            if (r) {
                steps << *r;
            }
        }
        steps << '\n';
    }
    if (!anchors || !steps) {
        throw DatasetError(dir.string(), 0, "write failed");
    }
}

NonlinearSSM uwb_measurement_model(const AnchorSet& anchors, double tag_z, double q_var, double r_var)
{
    NonlinearSSM model;
    model.state_dim = 2;
    model.meas_dim = static_cast<Index>(anchors.size());
    model.process_fn = [](const VectorXd& x) { return x; };
    model.meas_fn = [anchors, tag_z](const VectorXd& x) {
        VectorXd h(static_cast<Index>(anchors.size()));
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const auto& a = anchors.anchors[i];
            const double dx = x(0) - a.x;
            const double dy = x(1) - a.y;
            const double dz = tag_z - a.z;
            h(static_cast<Index>(i)) = std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        return h;
    };
    model.process_cov = q_var * MatrixXd::Identity(2, 2);
    model.meas_var_diag = VectorXd::Constant(model.meas_dim, r_var);
    return model;
}

std::vector<Measurement> encode_measurements(const Dataset& ds)
{
    std::vector<Measurement> out;
    out.reserve(ds.steps.size());
    long k = 0;
    for (const auto& rec : ds.steps) {
        Measurement y{++k, VectorXd::Zero(static_cast<Index>(ds.anchors.size()))};
        for (std::size_t i = 0; i < rec.ranges.size(); ++i) {
            if (rec.ranges[i]) {
                y.values(static_cast<Index>(i)) = *rec.ranges[i];
            }
        }
        out.push_back(std::move(y));
    }
    return out;
}

LocalizationReport run_localization(const Dataset& ds, const LocalizationConfig& cfg, FilterKind kind)
{
    LocalizationReport report;
    report.scenario = cfg.scenario;
    report.variant = std::string(to_string(kind));
    report.steps = static_cast<long>(ds.steps.size());
    report.runs = cfg.runs;
    if (ds.steps.empty() || cfg.runs < 1) {
        report.absent_rejection_rate = std::numeric_limits<double>::quiet_NaN();
        return report;
    }

    const NonlinearSSM model = uwb_measurement_model(ds.anchors, cfg.tag_z, cfg.q_var, cfg.r_var);
    const std::vector<Measurement> ys = encode_measurements(ds);
    PositionSeries truth;
    for (const auto& rec : ds.steps) {
        truth.push_back(rec.truth);
    }

    std::vector<PositionSeries> tracks;
    std::vector<PositionSeries> truths;
    double runtime = 0.0;
    std::size_t absent_steps = 0;
    std::size_t rejected_steps = 0;
    const double init_sd = std::sqrt(cfg.init_var);
    for (int run = 0; run < cfg.runs; ++run) {
        auto rng = tracking::make_rng(cfg.seed + static_cast<std::uint64_t>(run), 1);
        std::normal_distribution<double> unit(0.0, 1.0);
        VectorXd m0(2);
        m0 << cfg.x0.x() + init_sd * unit(rng), cfg.x0.y() + init_sd * unit(rng);
        const GaussianBelief init(m0, cfg.init_var * MatrixXd::Identity(2, 2));

        const auto t0 = std::chrono::steady_clock::now();
        const auto results = run_filter(kind, model, init, ys, cfg.indicator, cfg.ut);
        const auto t1 = std::chrono::steady_clock::now();

        LocalizationRun detail;
        detail.runtime_s = std::chrono::duration<double>(t1 - t0).count();
        runtime += detail.runtime_s;
        for (std::size_t k = 0; k < results.size(); ++k) {
            const auto& r = results[k];
            detail.track.emplace_back(r.posterior.mean()(0), r.posterior.mean()(1));
            detail.omega.push_back(r.indicators.omega);
            detail.iterations.push_back(r.iterations);
            bool any_absent = false;
            bool all_rejected = true;
            for (std::size_t i = 0; i < ds.anchors.size(); ++i) {
                if (!ds.steps[k].ranges[i]) {
                    any_absent = true;
                    all_rejected = all_rejected && r.indicators.omega(static_cast<Index>(i)) < 0.01;
                }
            }
            if (any_absent) {
                ++absent_steps;
                rejected_steps += all_rejected ? 1 : 0;
            }
        }
        tracks.push_back(detail.track);
        truths.push_back(truth);
        report.run_details.push_back(std::move(detail));
    }
    const RmseResult rmse = rmse_pos(tracks, truths);
    report.rmse_m = rmse.aggregate;
    report.per_step_rmse = rmse.per_step;
    report.mean_runtime_s = runtime / cfg.runs;
    report.absent_rejection_rate = absent_steps > 0
                                       ? static_cast<double>(rejected_steps) / static_cast<double>(absent_steps)
                                       : std::numeric_limits<double>::quiet_NaN();
    return report;
}

std::string report_json(const LocalizationReport& report)
{
    nlohmann::json j;
    j["scenario"] = report.scenario;
    j["variant"] = report.variant;
    j["rmse_m"] = report.rmse_m;
    j["mean_runtime_s"] = report.mean_runtime_s;
    j["steps"] = report.steps;
    return j.dump(2);
}

Dataset synthetic_replica(const ReplicaConfig& cfg)
{
    if (cfg.num_anchors < 2 || cfg.max_readings < 1 || !(cfg.step_length > 0.0)) {
        throw std::invalid_argument("invalid replica configuration");
    }
    Dataset ds;
    for (int i = 0; i < cfg.num_anchors; ++i) {
        Anchor a;
        a.id = i + 1;
        a.x = cfg.corridor_length * i / (cfg.num_anchors - 1);
        a.y = (i % 2 == 0 ? -0.5 : 0.5) * cfg.corridor_width;
        a.z = i % 2 == 0 ? cfg.anchor_z_low : cfg.anchor_z_high;
        ds.anchors.anchors.push_back(a);
    }

    // Lap: out along y = 0, across, back along y = 0.8, home.
    const double far = cfg.corridor_length - 2.0;
    const std::vector<Eigen::Vector2d> waypoints{{0.0, 0.0}, {far, 0.0}, {far, 0.8}, {0.0, 0.8}, {0.0, 0.0}};
    PositionSeries path;
    for (std::size_t w = 0; w + 1 < waypoints.size(); ++w) {
        const Eigen::Vector2d delta = waypoints[w + 1] - waypoints[w];
        const int n = std::max(1, static_cast<int>(std::ceil(delta.norm() / cfg.step_length)));
        for (int s = 1; s <= n; ++s) {
            path.push_back(waypoints[w] + delta * (static_cast<double>(s) / n));
        }
    }

    auto rng = tracking::make_rng(cfg.seed, 0);
    std::normal_distribution<double> noise(0.0, cfg.noise_sd);
    std::bernoulli_distribution nlos(cfg.nlos_prob);
    std::uniform_real_distribution<double> bias(cfg.nlos_bias_low, cfg.nlos_bias_high);

    const std::size_t na = ds.anchors.size();
    long step = 0;
    for (const auto& p : path) {
        StepRecord rec;
        rec.step_index = ++step;
        rec.truth = p;
        rec.ranges.assign(na, std::nullopt);
        std::vector<double> dist(na);
        for (std::size_t i = 0; i < na; ++i) {
            const auto& a = ds.anchors.anchors[i];
            dist[i] = std::sqrt((p.x() - a.x) * (p.x() - a.x) + (p.y() - a.y) * (p.y() - a.y) +
                                (cfg.tag_z - a.z) * (cfg.tag_z - a.z));
        }
        std::vector<std::size_t> order(na);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return dist[l] < dist[r]; });
        const std::size_t count = std::min<std::size_t>(na, static_cast<std::size_t>(cfg.max_readings));
        for (std::size_t c = 0; c < count; ++c) {
            const std::size_t i = order[c];
            double reading = dist[i] + noise(rng);
            if (nlos(rng)) {
                reading += bias(rng);
            }
            rec.ranges[i] = std::max(0.0, reading);
        }
        ds.steps.push_back(std::move(rec));
    }
    return ds;
}

} // namespace sor::uwb
