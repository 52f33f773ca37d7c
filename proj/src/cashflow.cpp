#include "rov/cashflow.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "rov/parallel.hpp"

namespace rov {

void CostModel::validate() const {
    if (!(c_dg > 0.0)) throw std::invalid_argument("CostModel: c_dg must be > 0");
    if (!(c_om >= 0.0)) throw std::invalid_argument("CostModel: c_om must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("CostModel: r must be > 0");
    if (!(dnsp_share > 0.0 && dnsp_share <= 1.0)) {
        throw std::invalid_argument("CostModel: dnsp_share must lie in (0,1]");
    }
    if (!(battery_ratio >= 0.0)) throw std::invalid_argument("CostModel: battery_ratio must be >= 0");
    if (!(fuel_burn > 0.0)) throw std::invalid_argument("CostModel: fuel_burn must be > 0");
    if (!(peak_hours > 0.0)) throw std::invalid_argument("CostModel: peak_hours must be > 0");
}

void CapacityPlan::validate() const {
    for (double v : installed_capacity) {
        if (!(v >= 0.0)) throw std::invalid_argument("CapacityPlan: installed capacity must be >= 0");
    }
    for (double v : expansion_capacity) {
        if (!(v >= 0.0)) throw std::invalid_argument("CapacityPlan: expansion capacity must be >= 0");
    }
}

void PayoffMatrix::write_csv(std::ostream& os) const {
    os << "path,year,payoff\n";
    char buf[40];
    for (std::size_t w = 0; w < n_paths; ++w) {
        for (int y = window.first; y <= window.last; ++y) {
            std::snprintf(buf, sizeof(buf), "%.17g", (*this)(w, y));
            os << w << ',' << y << ',' << buf << "\n";
        }
    }
}

double npv(std::span<const std::pair<int, double>> cashflows, double r) {
    if (r <= -1.0) {
        throw std::invalid_argument("npv: rate must be > -1");
    }
    double total = 0.0;
    for (const auto& [year, amount] : cashflows) {
        if (year < 1) {
            throw std::invalid_argument("npv: years must be >= 1");
        }
        total += amount / std::pow(1.0 + r, static_cast<double>(year));
    }
    return total;
}

double uncovered_energy_cost(double fuel_price, double uncovered_energy_kwh, double fuel_burn) {
    if (fuel_price < 0.0 || uncovered_energy_kwh < 0.0 || fuel_burn < 0.0) {
        throw std::invalid_argument("uncovered_energy_cost: inputs must be >= 0");
    }
    return fuel_price * fuel_burn * uncovered_energy_kwh;
}

double om_charge(const CostModel& cost, int year, int horizon) {
    double total = 0.0;
    for (int k = 1; k <= horizon - year; ++k) {
        total += cost.c_om / std::pow(1.0 + cost.r, static_cast<double>(k));
    }
    return total;
}

double avoided_generation_value(const ScenarioSet& scenario, const CostModel& cost, int year,
                                std::size_t path, double capacity_kw) {
    const int horizon = static_cast<int>(scenario.n_steps());
    double total = 0.0;
    for (int k = year + 1; k <= horizon; ++k) {
        const double annual = uncovered_energy_cost(
            scenario.fuel(path, static_cast<std::size_t>(k)),
            capacity_kw * cost.peak_hours, cost.fuel_burn);
        total += annual / std::pow(1.0 + cost.r, static_cast<double>(k - year));
    }
    return total;
}

namespace {

void check_year(const ScenarioSet& scenario, int year) {
    if (year < 1 || year > static_cast<int>(scenario.n_steps())) {
        throw std::invalid_argument("payoff: year outside the scenario horizon");
    }
}

// The invest-stage benefit credits the diesel cost avoided on the full
// over-limit demand of each remaining year, so the payoff stays exactly
// affine in the year-t capacity state.
double invest_benefit(const ScenarioSet& scenario, const CostModel& cost, int year,
                      std::size_t path) {
    const int horizon = static_cast<int>(scenario.n_steps());
    double total = 0.0;
    for (int k = year + 1; k <= horizon; ++k) {
        const double annual = uncovered_energy_cost(
            scenario.fuel(path, static_cast<std::size_t>(k)),
            scenario.demand(path, static_cast<std::size_t>(k)) * cost.peak_hours,
            cost.fuel_burn);
        total += annual / std::pow(1.0 + cost.r, static_cast<double>(k - year));
    }
    return total;
}

} // namespace

double investment_payoff(const ScenarioSet& scenario, const CostModel& cost, int year,
                         std::size_t path) {
    check_year(scenario, year);
    const auto t = static_cast<std::size_t>(year);
    const double capacity = scenario.demand(path, t);
    const double margin = cost.c_dg - cost.dnsp_share * scenario.pv_cost(path, t);
    const double capital = margin * capacity;
    const double om = om_charge(cost, year, static_cast<int>(scenario.n_steps()));
    return capital - om + invest_benefit(scenario, cost, year, path);
}

double expansion_payoff(const ScenarioSet& scenario, const CostModel& cost,
                        const CapacityPlan& plan, int year, std::size_t path) {
    check_year(scenario, year);
    if (year <= plan.sizing_year) {
        throw std::invalid_argument("expansion_payoff: year must fall after the first stage");
    }
    if (path >= plan.installed_capacity.size()) {
        throw std::invalid_argument("expansion_payoff: plan does not cover this path");
    }
    const auto t = static_cast<std::size_t>(year);
    const double incremental =
        std::max(0.0, scenario.demand(path, t) - plan.installed_capacity[path]);
    const double margin = cost.c_dg - cost.dnsp_share * scenario.pv_cost(path, t);
    const double om = om_charge(cost, year, static_cast<int>(scenario.n_steps()));
    return margin * incremental - om +
           avoided_generation_value(scenario, cost, year, path, incremental);
}

CapacityPlan size_first_stage(const ScenarioSet& scenario, const DecisionWindows& windows) {
    windows.validate();
    const std::size_t n = scenario.n_paths();
    const auto sizing_year = static_cast<std::size_t>(windows.invest.last);
    const double mean_capacity =
        par::block_sum(n, [&](std::size_t w) { return scenario.demand(w, sizing_year); }) /
        static_cast<double>(n);

    CapacityPlan plan;
    plan.sizing_year = windows.invest.last;
    plan.installed_capacity.assign(n, mean_capacity);
    plan.expansion_capacity.resize(n);
    const auto last = static_cast<std::size_t>(windows.expand.last);
    for (std::size_t w = 0; w < n; ++w) {
        plan.expansion_capacity[w] = std::max(0.0, scenario.demand(w, last) - mean_capacity);
    }
    plan.validate();
    return plan;
}

std::pair<PayoffMatrix, PayoffMatrix> build_payoff_matrices(const ScenarioSet& scenario,
                                                            const CostModel& cost,
                                                            const DecisionWindows& windows) {
    cost.validate();
    windows.validate();
    if (static_cast<int>(scenario.n_steps()) < windows.expand.last) {
        throw std::invalid_argument("build_payoff_matrices: scenario horizon does not cover the expand window");
    }

    const std::size_t n = scenario.n_paths();
    PayoffMatrix invest;
    invest.n_paths = n;
    invest.window = windows.invest;
    invest.option_id = OptionId::invest;
    invest.dt = scenario.dt();
    invest.values.resize(n * static_cast<std::size_t>(windows.invest.size()));

    PayoffMatrix expand;
    expand.n_paths = n;
    expand.window = windows.expand;
    expand.option_id = OptionId::expand;
    expand.dt = scenario.dt();
    expand.values.resize(n * static_cast<std::size_t>(windows.expand.size()));

    const CapacityPlan plan = size_first_stage(scenario, windows);

    par::parallel_for(n, [&](std::size_t w) {
        for (int y = windows.invest.first; y <= windows.invest.last; ++y) {
            invest(w, y) = investment_payoff(scenario, cost, y, w);
        }
        for (int y = windows.expand.first; y <= windows.expand.last; ++y) {
            expand(w, y) = expansion_payoff(scenario, cost, plan, y, w);
        }
    });
    return {std::move(invest), std::move(expand)};
}

} // namespace rov
