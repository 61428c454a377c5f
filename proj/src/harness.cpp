#include "sor/harness.hpp"

#include "sor/uwb.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

namespace sor::harness {

using nlohmann::json;
using tracking::Law;

namespace {

Law parse_law(const json& j, const char* key)
{
    if (j.is_number()) {
        return Law::fixed(j.get<double>());
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        const double lo = j[0].get<double>();
        const double hi = j[1].get<double>();
        if (!(lo <= hi)) {
            throw std::invalid_argument(std::string(key) + ": interval must satisfy lo <= hi");
        }
        return Law::uniform(lo, hi);
    }
    throw std::invalid_argument(std::string(key) + ": expected a number or [lo, hi]");
}

json law_json(const Law& law)
{
    if (law.is_fixed()) {
        return law.lo;
    }
    return json::array({law.lo, law.hi});
}

SweepAxis parse_axis(const std::string& s)
{
    if (s == "none") {
        return SweepAxis::None;
    }
    if (s == "lambda") {
        return SweepAxis::Lambda;
    }
    if (s == "gamma") {
        return SweepAxis::Gamma;
    }
    if (s == "m") {
        return SweepAxis::NumSensors;
    }
    throw std::invalid_argument("unknown sweep axis '" + s + "' (expected none, lambda, gamma or m)");
}

std::string format_value(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

struct FilterOutcome {
    std::optional<PositionSeries> track;
    double runtime_s = 0.0;
    double mean_iterations = 0.0;
    std::string error;
};

struct RunOutcome {
    std::uint64_t seed = 0;
    PositionSeries truth;
    std::vector<FilterOutcome> filters;
    std::string setup_error;
};

VectorXd sample_gaussian(const VectorXd& mean, const MatrixXd& cov, tracking::Rng& rng)
{
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    const MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::normal_distribution<double> unit(0.0, 1.0);
    VectorXd z(mean.size());
    for (Index i = 0; i < z.size(); ++i) {
        z(i) = unit(rng);
    }
    return mean + root * z;
}

RunOutcome tracking_run(const ScenarioConfig& cfg, std::uint64_t seed)
{
    RunOutcome out;
    out.seed = seed;
    out.filters.resize(cfg.filters.size());
    try {
        const auto field = tracking::SensorField::lattice(cfg.num_sensors / 2);
        const VectorXd x0 = tracking::reference_initial_state();

        auto sim_rng = tracking::make_rng(seed, 0);
        tracking::CorruptionConfig cc;
        cc.mode = cfg.mode;
        cc.lambda = cfg.lambda.draw(sim_rng);
        cc.gamma = cfg.gamma;
        cc.sigma_theta = cfg.sigma_theta;
        cc.sigma_rho = cfg.sigma_rho;
        const tracking::Trajectory traj = tracking::simulate(cfg.turn, field, cc, x0, cfg.steps, sim_rng);
        for (std::size_t k = 1; k < traj.states.size(); ++k) {
            out.truth.emplace_back(traj.states[k](0), traj.states[k](2));
        }

        auto init_rng = tracking::make_rng(seed, 1);
        const MatrixXd p0 = 100.0 * tracking::process_noise_cov(cfg.turn);
        const GaussianBelief init(sample_gaussian(x0, p0, init_rng), p0);

        auto param_rng = tracking::make_rng(seed, 2);
        IndicatorConfig ic;
        ic.epsilon = cfg.epsilon.draw(param_rng);
        ic.theta_prior.resize(field.meas_dim());
        for (Index i = 0; i < ic.theta_prior.size(); ++i) {
            ic.theta_prior(i) = cfg.theta.draw(param_rng);
        }
        ic.tau = cfg.tau;
        ic.max_iters = cfg.max_iters;
        ic.moments = cfg.moments;

        const NonlinearSSM model = tracking::make_tracking_model(cfg.turn, field, cfg.sigma_theta, cfg.sigma_rho);
        for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
            FilterOutcome& fo = out.filters[f];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const auto results = run_filter(cfg.filters[f], model, init, traj.measurements, ic, cfg.ut);
                const auto t1 = std::chrono::steady_clock::now();
                fo.runtime_s = std::chrono::duration<double>(t1 - t0).count();
                PositionSeries track;
                double iters = 0.0;
                for (const auto& r : results) {
                    track.emplace_back(r.posterior.mean()(0), r.posterior.mean()(2));
                    iters += r.iterations;
                }
                fo.mean_iterations = results.empty() ? 0.0 : iters / static_cast<double>(results.size());
                fo.track = std::move(track);
            } catch (const std::exception& e) {
                fo.error = e.what();
            }
        }
    } catch (const std::exception& e) {
        out.setup_error = e.what();
    }
    return out;
}

std::vector<RunOutcome> run_all(const ScenarioConfig& cfg)
{
    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(cfg.runs));
    const int workers = std::max(1, std::min(cfg.threads, cfg.runs));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int r = next++; r < cfg.runs; r = next++) {
            outcomes[static_cast<std::size_t>(r)] = tracking_run(cfg, cfg.seed + static_cast<std::uint64_t>(r));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return outcomes;
}

SweepPoint assemble(const ScenarioConfig& cfg, const std::vector<RunOutcome>& outcomes)
{
    SweepPoint point;
    for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
        FilterSeries fs;
        fs.filter = cfg.filters[f];
        std::vector<PositionSeries> tracks;
        std::vector<PositionSeries> truths;
        for (const RunOutcome& run : outcomes) {
            if (!run.setup_error.empty()) {
                continue;
            }
            const FilterOutcome& fo = run.filters[f];
            if (!fo.track) {
                point.failures.push_back({run.seed, fs.filter, fo.error});
                continue;
            }
            fs.run_seeds.push_back(run.seed);
            fs.run_rmse.push_back(rmse_pos({*fo.track}, {run.truth}).aggregate);
            fs.run_runtime_s.push_back(fo.runtime_s);
            fs.run_mean_iterations.push_back(fo.mean_iterations);
            tracks.push_back(*fo.track);
            truths.push_back(run.truth);
        }
        if (!tracks.empty()) {
            const RmseResult rmse = rmse_pos(tracks, truths);
            fs.per_step_rmse = rmse.per_step;
            fs.aggregate_rmse = rmse.aggregate;
        } else {
            fs.aggregate_rmse = std::numeric_limits<double>::quiet_NaN();
        }
        point.filters.push_back(std::move(fs));
    }
    for (const RunOutcome& run : outcomes) {
        if (!run.setup_error.empty()) {
            for (FilterKind kind : cfg.filters) {
                point.failures.push_back({run.seed, kind, run.setup_error});
            }
        }
    }
    return point;
}

SweepPoint uwb_point(const ScenarioConfig& cfg)
{
    const uwb::Dataset ds =
        cfg.uwb.data_dir.empty() ? uwb::synthetic_replica({}) : uwb::load_dataset(cfg.uwb.data_dir);
    uwb::LocalizationConfig lc;
    lc.scenario = cfg.uwb.scenario;
    lc.tag_z = tag_height(cfg.uwb);
    lc.runs = cfg.runs;
    lc.seed = cfg.seed;
    lc.indicator.epsilon = cfg.epsilon.lo;
    lc.indicator.tau = cfg.tau;
    lc.indicator.max_iters = cfg.max_iters;
    lc.indicator.moments = cfg.moments;
    lc.ut = cfg.ut;
    PositionSeries truth;
    for (const auto& rec : ds.steps) {
        truth.push_back(rec.truth);
    }

    SweepPoint point;
    for (FilterKind kind : cfg.filters) {
        FilterSeries fs;
        fs.filter = kind;
        try {
            const uwb::LocalizationReport rep = uwb::run_localization(ds, lc, kind);
            fs.per_step_rmse = rep.per_step_rmse;
            fs.aggregate_rmse = rep.rmse_m;
            for (std::size_t r = 0; r < rep.run_details.size(); ++r) {
                const auto& d = rep.run_details[r];
                fs.run_seeds.push_back(cfg.seed + r);
                fs.run_rmse.push_back(rmse_pos({d.track}, {truth}).aggregate);
                fs.run_runtime_s.push_back(d.runtime_s);
                const double iters = std::accumulate(d.iterations.begin(), d.iterations.end(), 0.0);
                fs.run_mean_iterations.push_back(d.iterations.empty() ? 0.0 : iters / d.iterations.size());
            }
        } catch (const std::exception& e) {
            point.failures.push_back({cfg.seed, kind, e.what()});
            fs.aggregate_rmse = std::numeric_limits<double>::quiet_NaN();
        }
        point.filters.push_back(std::move(fs));
    }
    return point;
}

} // namespace

void ScenarioConfig::validate() const
{
    if (runs < 1) {
        throw std::invalid_argument("runs must be at least 1");
    }
    if (steps < 1) {
        throw std::invalid_argument("K must be at least 1");
    }
    if (num_sensors < 2 || num_sensors % 2 != 0) {
        throw std::invalid_argument("num_sensors must be a positive even number");
    }
    if (filters.empty()) {
        throw std::invalid_argument("filter list is empty");
    }
    if (axis != SweepAxis::None && values.empty()) {
        throw std::invalid_argument("sweep values are empty");
    }
    if (!(lambda.lo >= 0.0 && lambda.hi <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1]");
    }
    if (!(gamma.lo >= 1.0)) {
        throw std::invalid_argument("gamma must be at least 1");
    }
    if (!(sigma_theta > 0.0 && sigma_rho > 0.0)) {
        throw std::invalid_argument("noise standard deviations must be positive");
    }
    if (!(epsilon.lo > 0.0 && epsilon.hi < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (!(theta.lo > 0.0 && theta.hi < 1.0)) {
        throw std::invalid_argument("theta must lie in (0, 1)");
    }
    if (!(turn.dt > 0.0 && turn.eta1 >= 0.0 && turn.eta2 >= 0.0)) {
        throw std::invalid_argument("invalid turn model parameters");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be at least 1");
    }
    if (axis == SweepAxis::NumSensors) {
        for (double v : values) {
            if (v < 2 || std::fmod(v, 2.0) != 0.0) {
                throw std::invalid_argument("m sweep values must be positive even integers");
            }
        }
    }
}

ScenarioConfig parse_config(const std::string& json_text)
{
    const json j = json::parse(json_text);
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    ScenarioConfig cfg;
    for (const auto& [key, v] : j.items()) {
        if (key == "name") {
            cfg.name = v.get<std::string>();
        } else if (key == "model") {
            const auto s = v.get<std::string>();
            if (s != "tracking" && s != "uwb") {
                throw std::invalid_argument("model must be tracking or uwb");
            }
            cfg.model = s == "uwb" ? ModelKind::Uwb : ModelKind::Tracking;
        } else if (key == "mode") {
            const auto s = v.get<std::string>();
            if (s != "outliers" && s != "missing") {
                throw std::invalid_argument("mode must be outliers or missing");
            }
            cfg.mode = s == "missing" ? tracking::CorruptionMode::Missing : tracking::CorruptionMode::Outliers;
        } else if (key == "lambda") {
            cfg.lambda = parse_law(v, "lambda");
        } else if (key == "gamma") {
            cfg.gamma = parse_law(v, "gamma");
        } else if (key == "sigma_theta") {
            cfg.sigma_theta = v.get<double>();
        } else if (key == "sigma_rho") {
            cfg.sigma_rho = v.get<double>();
        } else if (key == "epsilon") {
            cfg.epsilon = parse_law(v, "epsilon");
        } else if (key == "theta") {
            cfg.theta = parse_law(v, "theta");
        } else if (key == "tau") {
            cfg.tau = v.get<double>();
        } else if (key == "max_iters") {
            cfg.max_iters = v.get<int>();
        } else if (key == "moments") {
            const auto s = v.get<std::string>();
            if (s != "fixed" && s != "relinearize") {
                throw std::invalid_argument("moments must be fixed or relinearize");
            }
            cfg.moments =
                s == "fixed" ? MomentStrategy::FixedAtPrediction : MomentStrategy::RelinearizeAtPosterior;
        } else if (key == "filters") {
            cfg.filters.clear();
            for (const auto& f : v) {
                cfg.filters.push_back(parse_filter_kind(f.get<std::string>()));
            }
        } else if (key == "K") {
            cfg.steps = v.get<long>();
        } else if (key == "runs") {
            cfg.runs = v.get<int>();
        } else if (key == "seed") {
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "num_sensors") {
            cfg.num_sensors = v.get<int>();
        } else if (key == "dt") {
            cfg.turn.dt = v.get<double>();
        } else if (key == "eta1") {
            cfg.turn.eta1 = v.get<double>();
        } else if (key == "eta2") {
            cfg.turn.eta2 = v.get<double>();
        } else if (key == "ut") {
            cfg.ut.alpha = v.value("alpha", cfg.ut.alpha);
            cfg.ut.beta = v.value("beta", cfg.ut.beta);
            cfg.ut.kappa = v.value("kappa", cfg.ut.kappa);
        } else if (key == "sweep") {
            cfg.axis = parse_axis(v.value("axis", std::string("none")));
            cfg.values = v.value("values", std::vector<double>{});
        } else if (key == "output") {
            cfg.output = v.get<std::string>();
        } else if (key == "threads") {
            cfg.threads = v.get<int>();
        } else if (key == "uwb") {
            cfg.uwb.data_dir = v.value("data", cfg.uwb.data_dir);
            cfg.uwb.scenario = v.value("scenario", cfg.uwb.scenario);
            if (v.contains("tag_z")) {
                cfg.uwb.tag_z = v.at("tag_z").get<double>();
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::None:
        return "none";
    case SweepAxis::Lambda:
        return "lambda";
    case SweepAxis::Gamma:
        return "gamma";
    case SweepAxis::NumSensors:
        return "m";
    }
    return "?";
}

ScenarioConfig at_sweep_value(const ScenarioConfig& cfg, double value)
{
    ScenarioConfig out = cfg;
    switch (cfg.axis) {
    case SweepAxis::None:
        break;
    case SweepAxis::Lambda:
        out.lambda = Law::fixed(value);
        break;
    case SweepAxis::Gamma:
        out.gamma = Law::fixed(value);
        break;
    case SweepAxis::NumSensors:
        out.num_sensors = static_cast<int>(value);
        break;
    }
    out.axis = SweepAxis::None;
    out.values.clear();
    return out;
}

double tag_height(const UwbSettings& s)
{
    if (s.tag_z) {
        return *s.tag_z;
    }
    return s.data_dir.empty() ? uwb::ReplicaConfig{}.tag_z : 0.0;
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double FilterSeries::median_rmse() const
{
    return median(run_rmse);
}

double FilterSeries::mean_runtime_s() const
{
    if (run_runtime_s.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::accumulate(run_runtime_s.begin(), run_runtime_s.end(), 0.0) /
           static_cast<double>(run_runtime_s.size());
}

double FilterSeries::mean_iterations() const
{
    if (run_mean_iterations.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::accumulate(run_mean_iterations.begin(), run_mean_iterations.end(), 0.0) /
           static_cast<double>(run_mean_iterations.size());
}

const FilterSeries& SweepPoint::series(FilterKind kind) const
{
    for (const auto& fs : filters) {
        if (fs.filter == kind) {
            return fs;
        }
    }
    throw std::out_of_range("filter '" + std::string(sor::to_string(kind)) + "' not in this sweep point");
}

bool RunReport::ok() const
{
    return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.failures.empty(); });
}

SweepPoint run_point(const ScenarioConfig& cfg)
{
    cfg.validate();
    if (cfg.axis != SweepAxis::None) {
        throw std::invalid_argument("run_point expects a configuration without a sweep axis");
    }
    if (cfg.model == ModelKind::Uwb) {
        return uwb_point(cfg);
    }
    return assemble(cfg, run_all(cfg));
}

RunReport run_sweep(const ScenarioConfig& cfg)
{
    cfg.validate();
    RunReport report;
    report.name = cfg.name;
    if (cfg.axis == SweepAxis::None) {
        report.points.push_back(run_point(cfg));
    } else {
        for (double v : cfg.values) {
            SweepPoint p = run_point(at_sweep_value(cfg, v));
            p.axis = cfg.axis;
            p.value = v;
            report.points.push_back(std::move(p));
        }
    }
    if (!cfg.output.empty()) {
        write_report(cfg.output, cfg, report);
    }
    return report;
}

std::string point_csv_name(const SweepPoint& point)
{
    if (point.axis == SweepAxis::None) {
        return "rmse.csv";
    }
    return "rmse_" + to_string(point.axis) + "_" + format_value(point.value) + ".csv";
}

void write_point_csv(std::ostream& os, const SweepPoint& point)
{
    os << "filter,step,rmse\n" << std::setprecision(17);
    for (const auto& fs : point.filters) {
        for (std::size_t k = 0; k < fs.per_step_rmse.size(); ++k) {
            os << sor::to_string(fs.filter) << ',' << k + 1 << ',' << fs.per_step_rmse[k] << '\n';
        }
    }
}

std::string summary_json(const ScenarioConfig& cfg, const RunReport& report)
{
    json j;
    j["name"] = report.name;
    j["generated_at"] = static_cast<std::int64_t>(std::time(nullptr));
    j["config"] = {
        {"model", cfg.model == ModelKind::Uwb ? "uwb" : "tracking"},
        {"mode", cfg.mode == tracking::CorruptionMode::Missing ? "missing" : "outliers"},
        {"lambda", law_json(cfg.lambda)},
        {"gamma", law_json(cfg.gamma)},
        {"epsilon", law_json(cfg.epsilon)},
        {"theta", law_json(cfg.theta)},
        {"K", cfg.steps},
        {"runs", cfg.runs},
        {"seed", cfg.seed},
        {"num_sensors", cfg.num_sensors},
        {"sweep", {{"axis", to_string(cfg.axis)}, {"values", cfg.values}}},
    };
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["points"] = json::array();
    for (const auto& p : report.points) {
        json jp;
        jp["axis"] = to_string(p.axis);
        jp["value"] = p.value;
        jp["csv"] = point_csv_name(p);
        jp["filters"] = json::object();
        for (const auto& fs : p.filters) {
            jp["filters"][std::string(sor::to_string(fs.filter))] = {
                {"aggregate_rmse", finite_or_null(fs.aggregate_rmse)},
                {"median_rmse", finite_or_null(fs.median_rmse())},
                {"mean_runtime_s", finite_or_null(fs.mean_runtime_s())},
                {"mean_iterations", finite_or_null(fs.mean_iterations())},
                {"run_seeds", fs.run_seeds},
                {"run_rmse", fs.run_rmse},
                {"run_runtime_s", fs.run_runtime_s},
            };
        }
        jp["failures"] = json::array();
        for (const auto& f : p.failures) {
            jp["failures"].push_back({{"seed", f.seed}, {"filter", sor::to_string(f.filter)}, {"error", f.error}});
        }
        j["points"].push_back(std::move(jp));
    }
    j["ok"] = report.ok();
    return j.dump(2);
}

void write_report(const std::filesystem::path& dir, const ScenarioConfig& cfg, const RunReport& report)
{
    std::filesystem::create_directories(dir);
    for (const auto& p : report.points) {
        std::ofstream os(dir / point_csv_name(p));
        write_point_csv(os, p);
        if (!os) {
            throw std::runtime_error("cannot write " + (dir / point_csv_name(p)).string());
        }
    }
    std::ofstream os(dir / "summary.json");
    os << summary_json(cfg, report) << '\n';
    if (!os) {
        throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    }
}

BenchResult run_bench(const ScenarioConfig& cfg)
{
    ScenarioConfig base = cfg;
    base.axis = SweepAxis::NumSensors;
    base.validate();
    BenchResult out;
    out.filters = cfg.filters;
    out.mean_runtime_s.assign(cfg.filters.size(), {});
    for (double m : cfg.values) {
        const SweepPoint p = run_point(at_sweep_value(base, m));
        out.num_sensors.push_back(m);
        for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
            out.mean_runtime_s[f].push_back(p.filters[f].mean_runtime_s());
        }
        out.failures.insert(out.failures.end(), p.failures.begin(), p.failures.end());
    }
    for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
        try {
            out.slopes.push_back(complexity_fit(out.num_sensors, out.mean_runtime_s[f]));
        } catch (const std::invalid_argument&) {
            out.slopes.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

void write_bench_csv(std::ostream& os, const BenchResult& bench)
{
    os << "m";
    for (FilterKind f : bench.filters) {
        os << ',' << sor::to_string(f) << "_runtime_s";
    }
    os << '\n' << std::setprecision(17);
    for (std::size_t p = 0; p < bench.num_sensors.size(); ++p) {
        os << bench.num_sensors[p];
        for (std::size_t f = 0; f < bench.filters.size(); ++f) {
            os << ',' << bench.mean_runtime_s[f][p];
        }
        os << '\n';
    }
}

double complexity_fit(const std::vector<double>& m, const std::vector<double>& runtime)
{
    if (m.size() != runtime.size()) {
        throw std::invalid_argument("complexity_fit: size mismatch");
    }
    if (m.size() < 3) {
        throw std::invalid_argument("complexity_fit needs at least 3 points");
    }
    const std::size_t n = m.size();
    std::vector<double> lx(n);
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m[i] > 0.0 && runtime[i] > 0.0)) {
            throw std::invalid_argument("complexity_fit needs positive values");
        }
        lx[i] = std::log(m[i]);
        ly[i] = std::log(runtime[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("complexity_fit needs distinct m values");
    }
    return sxy / sxx;
}

} // namespace sor::harness
