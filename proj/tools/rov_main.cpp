#include <CLI11.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rov/calibrate.hpp"
#include "rov/config.hpp"
#include "rov/errors.hpp"
#include "rov/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw rov::IngestError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content,
                std::vector<std::string>& outputs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw rov::IngestError("cannot write '" + path.string() + "'");
    }
    out << content;
    outputs.push_back(path.string());
}

rov::ScenarioConfig load_config(const std::string& path, std::uint64_t* seed_override,
                                long long* paths_override) {
    rov::ScenarioConfig cfg =
        path.empty() ? rov::ScenarioConfig{} : rov::config_from_json_text(read_file(path));
    if (seed_override) cfg.seed = *seed_override;
    if (paths_override) {
        if (*paths_override < 1) throw rov::ConfigError("--paths must be >= 1");
        cfg.n_paths = static_cast<std::size_t>(*paths_override);
    }
    const auto problems = cfg.validate();
    if (!problems.empty()) {
        std::string msg = "invalid config '" + path + "':";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw rov::ConfigError(msg);
    }
    return cfg;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& digest, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    rov::RunManifest manifest;
    manifest.command = command;
    manifest.config_digest = digest;
    manifest.seed = seed;
    manifest.created_utc = rov::utc_timestamp_now();
    manifest.outputs = outputs;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << rov::manifest_to_json_text(manifest);
}

struct ThermalLimit {
    double value = 0.0;
    rov::PowerUnit unit = rov::PowerUnit::kw;
};

ThermalLimit parse_thermal_limit(const std::string& text) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw rov::IngestError("cannot parse thermal limit '" + text + "'");
    }
    std::string unit;
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(text[i]))) {
            unit += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        }
    }
    ThermalLimit out;
    out.value = value;
    if (unit == "mva") {
        out.unit = rov::PowerUnit::mva;
    } else if (unit == "kw") {
        out.unit = rov::PowerUnit::kw;
    } else {
        throw rov::IngestError("thermal limit must carry a unit, e.g. '35 MVA' or '35000 kW'");
    }
    if (!(out.value > 0.0)) {
        throw rov::IngestError("thermal limit must be positive");
    }
    return out;
}

int cmd_calibrate(const std::string& load_path, const std::string& limit_text,
                  const std::string& price_path, const std::string& out_dir,
                  const std::string& bucket_name, double peak_duration) {
    const ThermalLimit limit = parse_thermal_limit(limit_text);

    std::ifstream load_in(load_path);
    if (!load_in) throw rov::IngestError("cannot open '" + load_path + "'");
    const rov::LoadSeries load = rov::read_load_csv(load_in);
    if (load.unit != limit.unit) {
        throw rov::IngestError("thermal limit unit does not match the load file's '# units:' header");
    }

    const rov::Bucketing bucket =
        bucket_name == "daily" ? rov::Bucketing::daily : rov::Bucketing::monthly;
    const rov::OverLimitSeries series = rov::aggregate_over_limit(load, limit.value, bucket);
    if (series.excluded_days > 0) {
        std::cerr << "warning: " << series.excluded_days
                  << " day(s) excluded from aggregation due to long gaps\n";
    }
    if (series.interpolated_records > 0) {
        std::cerr << "note: " << series.interpolated_records
                  << " record(s) filled by linear interpolation\n";
    }

    std::vector<double> capacity;
    capacity.reserve(series.buckets.size());
    for (const auto& b : series.buckets) {
        capacity.push_back(rov::bucket_capacity_kw(b, peak_duration));
    }
    const double dt_years = bucket == rov::Bucketing::monthly ? 1.0 / 12.0 : 1.0 / 365.25;
    const rov::CalibrationResult demand_fit = rov::calibrate_gbm(capacity, dt_years);

    std::ifstream price_in(price_path);
    if (!price_in) throw rov::IngestError("cannot open '" + price_path + "'");
    const auto [prices, price_dt] = rov::read_price_csv(price_in);
    const rov::CalibrationResult fuel_fit = rov::calibrate_mean_reverting(prices, price_dt);
    if (const auto* m = std::get_if<rov::MeanRevEstimate>(&fuel_fit.estimate);
        m && m->beta_unidentifiable) {
        std::cerr << "warning: fuel series has no variation; reversion speed is unidentifiable\n";
    }

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir / "demand_gbm.json", rov::calibration_to_json_text(demand_fit, "gbm"), outputs);
    write_file(dir / "fuel_mean_reverting.json",
               rov::calibration_to_json_text(fuel_fit, "mean_reverting"), outputs);
    write_manifest(dir, "calibrate", "", 0, outputs);
    std::cout << "calibration written to " << dir.string() << "\n";
    return 0;
}

int cmd_simulate(const rov::ScenarioConfig& cfg, const std::string& out_dir) {
    const rov::ScenarioSet scenario = rov::simulate_scenario_set(
        cfg.demand, cfg.demand_s0, cfg.fuel, cfg.fuel_s0, cfg.pv, cfg.pv_s0,
        static_cast<std::size_t>(cfg.horizon), cfg.n_paths, cfg.seed, cfg.correlation,
        cfg.windows.dt);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    const auto dump = [&](const rov::PathMatrix& m, const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw rov::IngestError(std::string("cannot write '") + name + "'");
        m.write_csv(out);
        outputs.push_back((dir / name).string());
    };
    dump(scenario.demand, "demand_paths.csv");
    dump(scenario.fuel, "fuel_paths.csv");
    dump(scenario.pv_cost, "pv_cost_paths.csv");
    write_manifest(dir, "simulate", rov::config_digest(cfg), cfg.seed, outputs);
    std::cout << "simulated " << cfg.n_paths << " paths over " << cfg.horizon << " years into "
              << dir.string() << "\n";
    return 0;
}

int cmd_value(const rov::ScenarioConfig& cfg, const std::string& out_dir, bool standalone,
              const std::string& format) {
    const rov::ValuationArtifacts artifacts = rov::run_valuation_detailed(cfg);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    write_file(dir / "report.json", rov::report_to_json_text(artifacts.report), outputs);
    write_file(dir / "report.csv",
               rov::report_csv_header(cfg.windows) +
                   rov::report_csv_row(artifacts.report, cfg.windows),
               outputs);
    write_file(dir / "stopping_times.csv", rov::stopping_times_csv(artifacts.solution), outputs);
    if (standalone) {
        const rov::StandaloneComparison cmp = rov::compare_standalone_vs_compound(cfg);
        write_file(dir / "standalone_vs_compound.json", rov::comparison_to_json_text(cmp),
                   outputs);
    }
    write_manifest(dir, "value", rov::config_digest(cfg), cfg.seed, outputs);

    if (format == "csv") {
        std::cout << rov::report_csv_header(cfg.windows)
                  << rov::report_csv_row(artifacts.report, cfg.windows);
    } else {
        std::cout << rov::report_to_json_text(artifacts.report);
    }
    return 0;
}

int cmd_sensitivity(const rov::ScenarioConfig& cfg, const std::string& sweep_path,
                    const std::string& out_dir, const std::string& format) {
    std::vector<std::pair<std::string, std::vector<double>>> sweeps;
    if (!sweep_path.empty()) {
        sweeps = rov::sweeps_from_json_text(read_file(sweep_path));
    }
    const std::vector<rov::SweepPoint> points = rov::run_sensitivity(cfg, sweeps);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    std::string table = rov::report_csv_header(cfg.windows);
    for (const auto& pt : points) {
        write_file(dir / (pt.scenario_id + ".json"), rov::report_to_json_text(pt.report),
                   outputs);
        table += rov::report_csv_row(pt.report, cfg.windows);
    }
    write_file(dir / "table2.csv", table, outputs);
    write_file(dir / "fig5_series.csv", rov::sensitivity_series_csv(points, cfg.windows),
               outputs);
    write_manifest(dir, "sensitivity", rov::config_digest(cfg), cfg.seed, outputs);

    if (format == "csv") {
        std::cout << table;
    } else {
        std::cout << "wrote " << points.size() << " scenario report(s) to " << dir.string()
                  << "\n";
    }
    return 0;
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const rov::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rov::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rov::ModelFitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rov::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compound real-options valuation of PV-battery versus diesel investments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "out";
    std::string format = "json";
    std::uint64_t seed_value = 0;
    long long paths_value = 0;
    bool seed_given = false;
    bool paths_given = false;

    const auto add_run_options = [&](CLI::App* cmd, bool with_config) {
        if (with_config) {
            cmd->add_option("--config", config_path, "JSON config file (defaults to the benchmark)");
        }
        cmd->add_option("--out", out_path, "output directory");
        cmd->add_option("--seed", seed_value, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--paths", paths_value, "override the number of Monte Carlo paths")
            ->each([&](const std::string&) { paths_given = true; });
        cmd->add_option("--format", format, "stdout summary format")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "estimate process parameters from historical data");
    std::string load_path, limit_text, price_path;
    std::string bucket_name = "monthly";
    double peak_duration = 4.0;
    cal->add_option("--load", load_path, "substation load CSV (timestamp,power)")->required();
    cal->add_option("--thermal-limit", limit_text, "transformer limit with unit, e.g. '35 MVA'")
        ->required();
    cal->add_option("--prices", price_path, "fuel price CSV (timestamp,price)")->required();
    cal->add_option("--out", out_path, "output directory");
    cal->add_option("--bucket", bucket_name, "aggregation bucket")
        ->check(CLI::IsMember({"daily", "monthly"}));
    cal->add_option("--peak-duration", peak_duration, "peak exposure hours per day");

    // simulate
    auto* sim = app.add_subcommand("simulate", "write simulated state-variable paths as CSV");
    add_run_options(sim, true);

    // value
    auto* val = app.add_subcommand("value", "run the compound valuation and write the report");
    bool standalone = false;
    add_run_options(val, true);
    val->add_flag("--standalone", standalone,
                  "also report the deferral option valued without the expansion option");

    // sensitivity
    auto* sens = app.add_subcommand("sensitivity", "run parameter sweeps against a base config");
    std::string sweep_path;
    add_run_options(sens, true);
    sens->add_option("--sweeps", sweep_path, "sweep spec JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    return guarded([&]() -> int {
        if (cal->parsed()) {
            return cmd_calibrate(load_path, limit_text, price_path, out_path, bucket_name,
                                 peak_duration);
        }
        const rov::ScenarioConfig cfg =
            load_config(config_path, seed_given ? &seed_value : nullptr,
                        paths_given ? &paths_value : nullptr);
        if (sim->parsed()) {
            return cmd_simulate(cfg, out_path);
        }
        if (val->parsed()) {
            return cmd_value(cfg, out_path, standalone, format);
        }
        return cmd_sensitivity(cfg, sweep_path, out_path, format);
    });
}
