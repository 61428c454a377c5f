// sorctl: run tracking sweeps, UWB localization, runtime benchmarks and the
// invariant checks from the command line.
#include "sor/checks.hpp"
#include "sor/harness.hpp"
#include "sor/uwb.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using sor::harness::ScenarioConfig;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<long> steps;
    std::optional<int> threads;
    std::string out;
    std::string filters;
};

void add_common(CLI::App* app, CommonOptions& opt)
{
    app->add_option("--config", opt.config, "JSON scenario file")->check(CLI::ExistingFile);
    app->add_option("--seed", opt.seed, "base seed; run r uses seed + r");
    app->add_option("--runs", opt.runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
    app->add_option("--steps,-K", opt.steps, "time steps per run")->check(CLI::PositiveNumber);
    app->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", opt.out, "output directory or file");
    app->add_option("--filters", opt.filters, "comma-separated subset of ukf,sor,msor");
}

ScenarioConfig resolve(const CommonOptions& opt)
{
    ScenarioConfig cfg = opt.config.empty() ? ScenarioConfig{} : sor::harness::load_config(opt.config);
    if (opt.seed) {
        cfg.seed = *opt.seed;
    }
    if (opt.runs) {
        cfg.runs = *opt.runs;
    }
    if (opt.steps) {
        cfg.steps = *opt.steps;
    }
    if (opt.threads) {
        cfg.threads = *opt.threads;
    }
    if (!opt.out.empty()) {
        cfg.output = opt.out;
    }
    if (!opt.filters.empty()) {
        cfg.filters.clear();
        std::stringstream ss(opt.filters);
        std::string name;
        while (std::getline(ss, name, ',')) {
            cfg.filters.push_back(sor::parse_filter_kind(name));
        }
    }
    cfg.validate();
    return cfg;
}

void print_point(const sor::harness::SweepPoint& p)
{
    if (p.axis != sor::harness::SweepAxis::None) {
        std::cout << sor::harness::to_string(p.axis) << " = " << p.value << '\n';
    }
    for (const auto& fs : p.filters) {
        std::cout << "  " << std::setw(5) << sor::to_string(fs.filter) << "  aggregate RMSE " << std::setw(12)
                  << fs.aggregate_rmse << "  median " << std::setw(12) << fs.median_rmse() << "  mean runtime "
                  << fs.mean_runtime_s() << " s  mean iterations " << fs.mean_iterations() << '\n';
    }
    for (const auto& f : p.failures) {
        std::cout << "  FAILED seed " << f.seed << " " << sor::to_string(f.filter) << ": " << f.error << '\n';
    }
}

int cmd_simulate(const CommonOptions& opt, const std::string& trajectory_file)
{
    const ScenarioConfig cfg = resolve(opt);
    if (!trajectory_file.empty()) {
        auto rng = sor::tracking::make_rng(cfg.seed, 0);
        sor::tracking::CorruptionConfig cc;
        cc.mode = cfg.mode;
        cc.lambda = cfg.lambda.draw(rng);
        cc.gamma = cfg.gamma;
        cc.sigma_theta = cfg.sigma_theta;
        cc.sigma_rho = cfg.sigma_rho;
        const auto traj = sor::tracking::simulate(cfg.turn, sor::tracking::SensorField::lattice(cfg.num_sensors / 2),
                                                  cc, sor::tracking::reference_initial_state(), cfg.steps, rng);
        std::ofstream os(trajectory_file);
        sor::tracking::write_trajectory_csv(os, traj);
    }
    const auto report = sor::harness::run_sweep(cfg);
    for (const auto& p : report.points) {
        print_point(p);
    }
    if (!cfg.output.empty()) {
        std::cout << "wrote " << cfg.output << '\n';
    }
    return report.ok() ? 0 : 1;
}

int cmd_uwb(const CommonOptions& opt, const std::string& data, std::optional<double> tag_z,
            const std::string& variant, const std::string& scenario)
{
    ScenarioConfig cfg = resolve(opt);
    if (!data.empty()) {
        cfg.uwb.data_dir = data;
    }
    if (tag_z) {
        cfg.uwb.tag_z = *tag_z;
    }
    if (!scenario.empty()) {
        cfg.uwb.scenario = scenario;
    }
    const sor::uwb::Dataset ds = cfg.uwb.data_dir.empty() ? sor::uwb::synthetic_replica({})
                                                          : sor::uwb::load_dataset(cfg.uwb.data_dir);
    sor::uwb::LocalizationConfig lc;
    lc.scenario = cfg.uwb.scenario;
    lc.tag_z = sor::harness::tag_height(cfg.uwb);
    lc.runs = cfg.runs;
    lc.seed = cfg.seed;
    lc.indicator.epsilon = cfg.epsilon.lo;
    lc.indicator.tau = cfg.tau;
    lc.indicator.max_iters = cfg.max_iters;
    lc.indicator.moments = cfg.moments;
    lc.ut = cfg.ut;
    const auto report = sor::uwb::run_localization(ds, lc, sor::parse_filter_kind(variant));
    const std::string text = sor::uwb::report_json(report);
    if (cfg.output.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream os(cfg.output);
        os << text << '\n';
        if (!os) {
            throw std::runtime_error("cannot write " + cfg.output);
        }
        std::cout << "wrote " << cfg.output << '\n';
    }
    return 0;
}

int cmd_bench(const CommonOptions& opt, const std::vector<double>& values)
{
    ScenarioConfig cfg = resolve(opt);
    if (!values.empty()) {
        cfg.values = values;
    }
    if (cfg.values.empty()) {
        cfg.values = {200, 400, 800};
    }
    const auto bench = sor::harness::run_bench(cfg);
    sor::harness::write_bench_csv(std::cout, bench);
    for (std::size_t f = 0; f < bench.filters.size(); ++f) {
        std::cout << "slope " << sor::to_string(bench.filters[f]) << " " << bench.slopes[f] << '\n';
    }
    if (!cfg.output.empty()) {
        std::ofstream os(cfg.output);
        sor::harness::write_bench_csv(os, bench);
    }
    for (const auto& f : bench.failures) {
        std::cout << "FAILED seed " << f.seed << " " << sor::to_string(f.filter) << ": " << f.error << '\n';
    }
    return bench.failures.empty() ? 0 : 1;
}

int cmd_check(std::uint64_t seed)
{
    bool ok = true;
    for (const auto& r : sor::run_checks(seed)) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name;
        if (!r.passed) {
            std::cout << ": " << r.detail;
        }
        std::cout << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outlier-robust Gaussian filtering experiments"};
    app.require_subcommand(1);

    CommonOptions sim_opt;
    std::string trajectory_file;
    auto* sim = app.add_subcommand("simulate", "tracking Monte Carlo sweeps");
    add_common(sim, sim_opt);
    sim->add_option("--trajectory", trajectory_file, "also dump the first run's trajectory as CSV");

    CommonOptions uwb_opt;
    std::string data;
    std::optional<double> tag_z;
    std::string variant = "msor";
    std::string scenario;
    auto* uwb = app.add_subcommand("uwb", "UWB localization on a dataset directory or the synthetic replica");
    add_common(uwb, uwb_opt);
    uwb->add_option("--data", data, "directory with anchors.csv and steps.csv")->check(CLI::ExistingDirectory);
    uwb->add_option("--tag-z", tag_z, "tag height in meters");
    uwb->add_option("--variant", variant, "ukf, sor or msor");
    uwb->add_option("--scenario", scenario, "scenario label for the report");

    CommonOptions bench_opt;
    std::vector<double> values;
    auto* bench = app.add_subcommand("bench", "runtime against the number of sensors");
    add_common(bench, bench_opt);
    bench->add_option("--m", values, "sensor counts (default 200 400 800)");

    std::uint64_t check_seed = 1;
    auto* chk = app.add_subcommand("check", "run the invariant suite");
    chk->add_option("--seed", check_seed, "seed for random instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_opt, trajectory_file);
        }
        if (uwb->parsed()) {
            return cmd_uwb(uwb_opt, data, tag_z, variant, scenario);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_opt, values);
        }
        return cmd_check(check_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
