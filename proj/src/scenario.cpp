#include "rov/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

#include "rov/errors.hpp"
#include "rov/parallel.hpp"

namespace rov {

const std::vector<std::string>& ScenarioConfig::parameter_names() {
    static const std::vector<std::string> names = {
        "mu_d",    "sigma_d", "demand_s0", "beta_f",    "s_bar_f",      "sigma_f",
        "fuel_s0", "r_pv",    "sigma_pv",  "pv_s0",     "c_dg",         "c_om",
        "r",       "dnsp_share", "battery_ratio", "fuel_burn", "peak_hours"};
    return names;
}

void ScenarioConfig::apply_override(const std::string& name, double value) {
    if (name == "mu_d") demand.mu = value;
    else if (name == "sigma_d") demand.sigma = value;
    else if (name == "demand_s0") demand_s0 = value;
    else if (name == "beta_f") fuel.beta = value;
    else if (name == "s_bar_f") fuel.s_bar = value;
    else if (name == "sigma_f") fuel.sigma = value;
    else if (name == "fuel_s0") fuel_s0 = value;
    else if (name == "r_pv") pv.r = value;
    else if (name == "sigma_pv") pv.sigma = value;
    else if (name == "pv_s0") pv_s0 = value;
    else if (name == "c_dg") costs.c_dg = value;
    else if (name == "c_om") costs.c_om = value;
    else if (name == "r") costs.r = value;
    else if (name == "dnsp_share") costs.dnsp_share = value;
    else if (name == "battery_ratio") costs.battery_ratio = value;
    else if (name == "fuel_burn") costs.fuel_burn = value;
    else if (name == "peak_hours") costs.peak_hours = value;
    else throw ConfigError("unknown parameter '" + name + "'");
}

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> problems;
    const auto check = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.emplace_back(e.what());
        }
    };
    check([&] { demand.validate(); });
    check([&] { fuel.validate(); });
    check([&] { pv.validate(); });
    check([&] { correlation.validate(); });
    check([&] { costs.validate(); });
    check([&] { windows.validate(); });
    check([&] { basis.validate(); });
    if (!(demand_s0 > 0.0)) problems.emplace_back("demand s0 must be > 0");
    if (!(fuel_s0 > 0.0)) problems.emplace_back("fuel s0 must be > 0");
    if (!(pv_s0 > 0.0)) problems.emplace_back("pv_cost s0 must be > 0");
    if (n_paths == 0) problems.emplace_back("n_paths must be >= 1");
    if (horizon < 1) problems.emplace_back("horizon must be >= 1");
    if (horizon < windows.expand.last) {
        problems.emplace_back("horizon must cover the expand window");
    }
    for (const auto& [name, value] : overrides) {
        const auto& names = parameter_names();
        bool known = false;
        for (const auto& n : names) {
            if (n == name) {
                known = true;
                break;
            }
        }
        if (!known) problems.emplace_back("unknown override parameter '" + name + "'");
        (void)value;
    }
    return problems;
}

namespace {

ScenarioConfig resolve(const ScenarioConfig& base) {
    ScenarioConfig cfg = base;
    for (const auto& [name, value] : cfg.overrides) {
        cfg.apply_override(name, value);
    }
    const auto problems = cfg.validate();
    if (!problems.empty()) {
        std::string msg = "invalid scenario config:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }
    if (cfg.n_paths < 100) {
        std::cerr << "warning: n_paths = " << cfg.n_paths
                  << " is below 100; valuation estimates will be noisy\n";
    }
    return cfg;
}

std::string recommend(double standard_npv, double option_value, double flexible_npv) {
    if (option_value > 0.0 && flexible_npv > standard_npv) return "defer";
    if (standard_npv > 0.0) return "invest now";
    return "abandon";
}

} // namespace

ValuationArtifacts run_valuation_detailed(const ScenarioConfig& config) {
    const ScenarioConfig cfg = resolve(config);

    const ScenarioSet scenario = simulate_scenario_set(
        cfg.demand, cfg.demand_s0, cfg.fuel, cfg.fuel_s0, cfg.pv, cfg.pv_s0,
        static_cast<std::size_t>(cfg.horizon), cfg.n_paths, cfg.seed, cfg.correlation,
        cfg.windows.dt);

    auto [invest, expand] = build_payoff_matrices(scenario, cfg.costs, cfg.windows);

    CompoundSolution solution =
        solve_compound(invest, expand, scenario, cfg.windows, cfg.basis, cfg.costs.r, {},
                       cfg.expansion_value_mode);

    const std::size_t n = cfg.n_paths;
    const int year1 = cfg.windows.invest.first;
    const double standard_npv =
        par::block_sum(n, [&](std::size_t w) { return invest(w, year1); }) /
        static_cast<double>(n);

    const CapacityPlan plan = size_first_stage(scenario, cfg.windows);

    ValuationArtifacts out;
    out.report.standard_npv = standard_npv;
    out.report.option_value = solution.deferral.value;
    out.report.flexible_npv = standard_npv + solution.deferral.value;
    out.report.expansion_option_value = solution.expansion.value;
    out.report.installed_capacity_kw = plan.installed_capacity.empty() ? 0.0
                                                                       : plan.installed_capacity[0];
    out.report.battery_energy_kwh = out.report.installed_capacity_kw * cfg.costs.battery_ratio;
    out.report.invest_frequency = exercise_frequency(solution.deferral);
    out.report.expand_frequency = exercise_frequency(solution.expansion);
    out.report.recommendation =
        recommend(out.report.standard_npv, out.report.option_value, out.report.flexible_npv);
    out.report.n_paths = n;
    out.report.seed = cfg.seed;
    out.solution = std::move(solution);
    return out;
}

ScenarioReport run_valuation(const ScenarioConfig& config) {
    return run_valuation_detailed(config).report;
}

std::vector<SweepPoint> run_sensitivity(
    const ScenarioConfig& base,
    const std::vector<std::pair<std::string, std::vector<double>>>& sweeps) {
    for (const auto& [param, values] : sweeps) {
        bool known = false;
        for (const auto& n : ScenarioConfig::parameter_names()) {
            if (n == param) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown sweep parameter '" + param + "'");
        }
        (void)values;
    }

    std::vector<SweepPoint> out;
    SweepPoint basept;
    basept.scenario_id = "S1";
    basept.description = "Benchmark";
    basept.report = run_valuation(base);
    basept.report.scenario_id = basept.scenario_id;
    basept.report.description = basept.description;
    out.push_back(std::move(basept));

    int index = 2;
    for (const auto& [param, values] : sweeps) {
        for (double value : values) {
            ScenarioConfig cfg = base; // same seed: common random numbers
            cfg.overrides[param] = value;

            SweepPoint pt;
            pt.scenario_id = "S" + std::to_string(index++);
            pt.param = param;
            pt.value = value;
            char buf[64];
            const bool rate_like = param == "mu_d" || param == "sigma_d" || param == "beta_f" ||
                                   param == "sigma_f" || param == "sigma_pv" ||
                                   param == "dnsp_share" || param == "r" || param == "r_pv";
            if (rate_like) {
                std::snprintf(buf, sizeof(buf), "%s = %g%%", param.c_str(), value * 100.0);
            } else {
                std::snprintf(buf, sizeof(buf), "%s = %g", param.c_str(), value);
            }
            pt.description = buf;
            pt.report = run_valuation(cfg);
            pt.report.scenario_id = pt.scenario_id;
            pt.report.description = pt.description;
            out.push_back(std::move(pt));
        }
    }
    return out;
}

StandaloneComparison compare_standalone_vs_compound(const ScenarioConfig& config) {
    const ScenarioConfig cfg = resolve(config);

    const ScenarioSet scenario = simulate_scenario_set(
        cfg.demand, cfg.demand_s0, cfg.fuel, cfg.fuel_s0, cfg.pv, cfg.pv_s0,
        static_cast<std::size_t>(cfg.horizon), cfg.n_paths, cfg.seed, cfg.correlation,
        cfg.windows.dt);
    auto [invest, expand] = build_payoff_matrices(scenario, cfg.costs, cfg.windows);

    CompoundSolution compound =
        solve_compound(invest, expand, scenario, cfg.windows, cfg.basis, cfg.costs.r, {},
                       cfg.expansion_value_mode);
    OptionSolution standalone =
        solve_single_option(invest, scenario, cfg.windows.invest, cfg.basis, cfg.costs.r);

    const std::size_t n = cfg.n_paths;
    const int year1 = cfg.windows.invest.first;
    const double standard_npv =
        par::block_sum(n, [&](std::size_t w) { return invest(w, year1); }) /
        static_cast<double>(n);

    StandaloneComparison out;
    out.compound_report.standard_npv = standard_npv;
    out.compound_report.option_value = compound.deferral.value;
    out.compound_report.flexible_npv = standard_npv + compound.deferral.value;
    out.compound_report.expansion_option_value = compound.expansion.value;
    out.compound_report.invest_frequency = exercise_frequency(compound.deferral);
    out.compound_report.expand_frequency = exercise_frequency(compound.expansion);
    out.compound_report.recommendation = recommend(
        out.compound_report.standard_npv, out.compound_report.option_value,
        out.compound_report.flexible_npv);
    out.compound_report.n_paths = n;
    out.compound_report.seed = cfg.seed;
    out.standalone_value = standalone.value;
    out.standalone_frequency = exercise_frequency(standalone);
    return out;
}

} // namespace rov
