#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rov/cashflow.hpp"
#include "rov/lsmc.hpp"
#include "rov/processes.hpp"
#include "rov/windows.hpp"

namespace rov {

// Everything a valuation run needs. Defaults are the benchmark
// parameterization used throughout the tests and the CLI: growing over-limit
// demand, diesel price reverting upward to its long-run level, PV-battery
// unit cost under the risk-neutral measure, and a peak-exposure conversion
// tuned so the year-1 mean payoff is negative while waiting stays valuable.
struct ScenarioConfig {
    GbmParams demand{0.015, 0.098};
    double demand_s0 = 900.0;
    MeanRevParams fuel{0.05, 2.6, 0.047};
    double fuel_s0 = 1.8;
    RiskNeutralParams pv{0.06, 0.09};
    double pv_s0 = 300.0;
    Correlation3 correlation;

    static CostModel benchmark_costs() {
        CostModel c;
        c.peak_hours = 65.0;
        return c;
    }

    CostModel costs = benchmark_costs();
    DecisionWindows windows;
    BasisSpec basis;
    ExpansionValueMode expansion_value_mode = ExpansionValueMode::pathwise;

    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    int horizon = 10;

    // Named replacements applied before a run (sensitivity machinery).
    std::map<std::string, double> overrides;

    // Names accepted in `overrides` and in sweep specs.
    static const std::vector<std::string>& parameter_names();
    void apply_override(const std::string& name, double value);

    // Collects every violated invariant (empty means valid).
    std::vector<std::string> validate() const;
};

struct ScenarioReport {
    std::string scenario_id = "S1";
    std::string description = "Benchmark";
    double standard_npv = 0.0;           // mean year-1 investment payoff
    double option_value = 0.0;           // compound deferral value
    double flexible_npv = 0.0;           // standard_npv + option_value
    double expansion_option_value = 0.0; // standalone expansion option value
    FrequencyDistribution invest_frequency;
    FrequencyDistribution expand_frequency;
    std::string recommendation; // defer | invest now | abandon
    // First-stage sizing: mean over-limit capacity at the sizing year, and
    // the battery that goes with it at battery_ratio kWh per kW of PV.
    double installed_capacity_kw = 0.0;
    double battery_energy_kwh = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

// Detailed outputs of a run, for stopping-time exports.
struct ValuationArtifacts {
    ScenarioReport report;
    CompoundSolution solution;
};

// Full pipeline: simulate -> payoff matrices -> compound solve -> report.
ScenarioReport run_valuation(const ScenarioConfig& config);
ValuationArtifacts run_valuation_detailed(const ScenarioConfig& config);

struct SweepPoint {
    std::string scenario_id;
    std::string description;
    std::string param; // empty for the base row
    double value = 0.0;
    ScenarioReport report;
};

// One report per (parameter, value), all sharing the base seed so
// differences are attributable to the parameter. The base report always
// comes first.
std::vector<SweepPoint> run_sensitivity(
    const ScenarioConfig& base,
    const std::vector<std::pair<std::string, std::vector<double>>>& sweeps);

struct StandaloneComparison {
    ScenarioReport compound_report;
    double standalone_value = 0.0;
    FrequencyDistribution standalone_frequency;
};

// Solves the deferral option with and without the expansion option on
// identical paths.
StandaloneComparison compare_standalone_vs_compound(const ScenarioConfig& config);

} // namespace rov
