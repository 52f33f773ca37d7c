#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rov/path_matrix.hpp"
#include "rov/windows.hpp"

namespace rov {

// Deterministic economic parameters. Currency is dollars throughout; k$
// appears only in formatted exports.
struct CostModel {
    double c_dg = 600.0;        // diesel generator capital cost, $/kW
    double c_om = 100000.0;     // annual operation and maintenance cost, $/yr
    double r = 0.06;            // discount rate, 1/yr
    double dnsp_share = 0.7;    // fraction of the PV-battery cost borne by the DNSP
    double battery_ratio = 2.0; // battery energy per PV power, kWh per kW
    double fuel_burn = 0.3;     // diesel litres per kWh generated
    double peak_hours = 1460.0; // hours/yr converting capacity shortfall to energy

    void validate() const;
};

enum class OptionId { invest, expand };

// Per-path, per-year exercise payoffs over one decision window.
struct PayoffMatrix {
    std::vector<double> values; // row-major, n_paths x window.size()
    std::size_t n_paths = 0;
    YearRange window;
    OptionId option_id = OptionId::invest;
    double dt = 1.0;

    double operator()(std::size_t path, int year) const {
        return values[path * static_cast<std::size_t>(window.size()) +
                      static_cast<std::size_t>(year - window.first)];
    }
    double& operator()(std::size_t path, int year) {
        return values[path * static_cast<std::size_t>(window.size()) +
                      static_cast<std::size_t>(year - window.first)];
    }

    void write_csv(std::ostream& os) const;
};

// First-stage installed capacity per path (a single sizing applied to all
// paths in the default pipeline) and the incremental capacity the expansion
// would add at the end of the horizon.
struct CapacityPlan {
    std::vector<double> installed_capacity;
    std::vector<double> expansion_capacity;
    int sizing_year = 0; // year whose cross-path mean fixed the first stage

    void validate() const;
};

// Sum of c_t / (1+r)^t over (year, amount) cash flows.
double npv(std::span<const std::pair<int, double>> cashflows, double r);

// Eq.-style fuel cost: price ($/L) * burn (L/kWh) * energy (kWh).
double uncovered_energy_cost(double fuel_price, double uncovered_energy_kwh, double fuel_burn);

// Discounted O&M commitment made by exercising at `year`: one annual charge
// per remaining year of the study horizon, discounted to the exercise year.
double om_charge(const CostModel& cost, int year, int horizon);

// Discounted avoided-diesel benefit of serving `capacity_kw` of over-limit
// peak demand from year+1 to the horizon on one path.
double avoided_generation_value(const ScenarioSet& scenario, const CostModel& cost, int year,
                                std::size_t path, double capacity_kw);

// Payoff of investing at (year, path): capital saving on the over-limit
// capacity state, minus the O&M commitment, plus the avoided diesel
// generation cost over the remaining horizon. Positive means the PV-battery
// route saves money versus diesel.
double investment_payoff(const ScenarioSet& scenario, const CostModel& cost, int year,
                         std::size_t path);

// Same structure on the incremental capacity max(0, demand - installed).
double expansion_payoff(const ScenarioSet& scenario, const CostModel& cost,
                        const CapacityPlan& plan, int year, std::size_t path);

// First-stage sizing: the cross-path mean of the demand state at the last
// invest-window year, applied to every path.
CapacityPlan size_first_stage(const ScenarioSet& scenario, const DecisionWindows& windows);

// Builds the invest and expand payoff matrices over the two windows.
std::pair<PayoffMatrix, PayoffMatrix> build_payoff_matrices(const ScenarioSet& scenario,
                                                            const CostModel& cost,
                                                            const DecisionWindows& windows);

} // namespace rov
