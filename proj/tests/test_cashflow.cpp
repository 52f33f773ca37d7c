#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "rov/cashflow.hpp"
#include "rov/processes.hpp"
#include "rov/serial_ref.hpp"
#include "test_support.hpp"

using namespace rov;
using test_support::constant_scenario;

namespace {

CostModel costs_with(double c_dg, double c_om, double share, double peak_hours,
                     double fuel_burn = 0.3, double r = 0.06) {
    CostModel c;
    c.c_dg = c_dg;
    c.c_om = c_om;
    c.dnsp_share = share;
    c.peak_hours = peak_hours;
    c.fuel_burn = fuel_burn;
    c.r = r;
    return c;
}

// Deterministic single-path scenario with a linearly growing demand ramp.
ScenarioSet ramp_scenario() {
    std::vector<double> demand(11), fuel(11, 2.0), pv(11, 800.0);
    for (int t = 0; t <= 10; ++t) demand[static_cast<std::size_t>(t)] = 100.0 + 10.0 * t;
    return build_scenario_set(PathMatrix::from_values(std::move(demand), 1, 10, 1.0, 0),
                              PathMatrix::from_values(std::move(fuel), 1, 10, 1.0, 0),
                              PathMatrix::from_values(std::move(pv), 1, 10, 1.0, 0));
}

} // namespace

TEST_CASE("npv: single flow, zero rate, empty, and domain errors") {
    const std::vector<std::pair<int, double>> one = {{1, 106.0}};
    CHECK(npv(one, 0.06) == 106.0 / std::pow(1.06, 1.0));
    CHECK(npv(one, 0.06) == doctest::Approx(100.0).epsilon(1e-15));

    const std::vector<std::pair<int, double>> many = {{1, 10.0}, {3, -4.0}, {7, 2.5}};
    CHECK(npv(many, 0.0) == doctest::Approx(8.5).epsilon(1e-15));

    CHECK(npv({}, 0.06) == 0.0);
    CHECK_THROWS_AS(npv(one, -1.0), std::invalid_argument);
    const std::vector<std::pair<int, double>> bad = {{0, 1.0}};
    CHECK_THROWS_AS(npv(bad, 0.06), std::invalid_argument);
}

TEST_CASE("uncovered_energy_cost: direct arithmetic and edges") {
    CHECK(uncovered_energy_cost(2.6, 0.0, 0.3) == 0.0);
    CHECK(uncovered_energy_cost(2.6, 1000.0, 0.3) == doctest::Approx(780.0).epsilon(1e-12));
    CHECK(uncovered_energy_cost(0.0, 1000.0, 0.3) == 0.0);
    CHECK_THROWS_AS(uncovered_energy_cost(-0.1, 1.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(uncovered_energy_cost(2.6, -1.0, 0.3), std::invalid_argument);
}

TEST_CASE("om_charge: one annual charge per remaining year, discounted") {
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);
    double expected = 0.0;
    for (int k = 1; k <= 7; ++k) expected += 100000.0 / std::pow(1.06, k);
    CHECK(om_charge(c, 3, 10) == expected);
    CHECK(om_charge(c, 10, 10) == 0.0);
}

TEST_CASE("investment_payoff: indifference point is exactly zero") {
    // dnsp_share * c_pv == c_dg, no O&M, fuel price 0 so no avoided cost.
    const ScenarioSet s = constant_scenario(4, 10, 50.0, 0.0, 1200.0);
    const CostModel c = costs_with(600.0, 0.0, 0.5, 65.0);
    for (int year = 1; year <= 5; ++year) {
        CHECK(investment_payoff(s, c, year, 2) == 0.0);
    }
}

TEST_CASE("investment_payoff: affine in the year-t capacity state") {
    const GbmParams d{0.015, 0.098};
    const MeanRevParams f{0.05, 2.6, 0.047};
    const RiskNeutralParams p{0.06, 0.09};
    ScenarioSet s = simulate_scenario_set(d, 900.0, f, 1.8, p, 300.0, 10, 64, 5);
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);

    test_support::TestRng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const auto w = static_cast<std::size_t>(rng.uniform(0.0, 64.0));
        const int year = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        const double base = investment_payoff(s, c, year, w);
        const double d0 = s.demand(w, static_cast<std::size_t>(year));
        const double slope = c.c_dg - c.dnsp_share * s.pv_cost(w, static_cast<std::size_t>(year));

        s.demand(w, static_cast<std::size_t>(year)) = 2.0 * d0;
        const double doubled = investment_payoff(s, c, year, w);
        s.demand(w, static_cast<std::size_t>(year)) = d0;

        CHECK(doubled - base ==
              doctest::Approx(slope * d0).epsilon(1e-11));
    }
}

TEST_CASE("investment_payoff: monotone in pv cost, fuel price, and capacity") {
    const GbmParams d{0.015, 0.098};
    const MeanRevParams f{0.05, 2.6, 0.047};
    const RiskNeutralParams p{0.06, 0.09};
    ScenarioSet s = simulate_scenario_set(d, 900.0, f, 1.8, p, 300.0, 10, 32, 8);
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);

    test_support::TestRng rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const auto w = static_cast<std::size_t>(rng.uniform(0.0, 32.0));
        const int year = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        const auto t = static_cast<std::size_t>(year);
        const double base = investment_payoff(s, c, year, w);

        const double pv0 = s.pv_cost(w, t);
        s.pv_cost(w, t) = pv0 * 1.25;
        CHECK(investment_payoff(s, c, year, w) <= base);
        s.pv_cost(w, t) = pv0;

        const double f0 = s.fuel(w, t + 1);
        s.fuel(w, t + 1) = f0 * 1.25;
        CHECK(investment_payoff(s, c, year, w) >= base);
        s.fuel(w, t + 1) = f0;

        if (c.c_dg > c.dnsp_share * s.pv_cost(w, t)) {
            const double d0 = s.demand(w, t);
            s.demand(w, t) = d0 * 1.25;
            CHECK(investment_payoff(s, c, year, w) >= base);
            s.demand(w, t) = d0;
        }
    }
}

TEST_CASE("expansion_payoff: zero incremental capacity pays exactly minus the O&M charge") {
    const ScenarioSet s = constant_scenario(3, 10, 100.0, 2.6, 400.0);
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);
    CapacityPlan plan;
    plan.sizing_year = 5;
    plan.installed_capacity.assign(3, 150.0); // above the flat demand
    plan.expansion_capacity.assign(3, 0.0);
    for (int year = 6; year <= 10; ++year) {
        CHECK(expansion_payoff(s, c, plan, year, 1) == -om_charge(c, year, 10));
    }
}

TEST_CASE("expansion_payoff: direct arithmetic on the incremental capacity") {
    // 100 kW incremental, c_dg=600, dnsp_share*c_pv=500, no O&M, no fuel.
    const ScenarioSet s = constant_scenario(2, 10, 250.0, 0.0, 1000.0);
    const CostModel c = costs_with(600.0, 0.0, 0.5, 65.0);
    CapacityPlan plan;
    plan.sizing_year = 5;
    plan.installed_capacity.assign(2, 150.0);
    plan.expansion_capacity.assign(2, 100.0);
    CHECK(expansion_payoff(s, c, plan, 7, 0) == doctest::Approx(10000.0).epsilon(1e-12));

    CHECK_THROWS_AS(expansion_payoff(s, c, plan, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(expansion_payoff(s, c, plan, 11, 0), std::invalid_argument);

    CapacityPlan bad = plan;
    bad.installed_capacity[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("build_payoff_matrices: shape contract") {
    const GbmParams d{0.015, 0.098};
    const MeanRevParams f{0.05, 2.6, 0.047};
    const RiskNeutralParams p{0.06, 0.09};
    const ScenarioSet s = simulate_scenario_set(d, 900.0, f, 1.8, p, 300.0, 10, 10000, 42);
    const auto [invest, expand] = build_payoff_matrices(s, costs_with(600.0, 100000.0, 0.7, 65.0),
                                                        DecisionWindows{});
    CHECK(invest.n_paths == 10000);
    CHECK(invest.values.size() == 10000 * 5);
    CHECK(invest.window == YearRange{1, 5});
    CHECK(expand.values.size() == 10000 * 5);
    CHECK(expand.window == YearRange{6, 10});
}

TEST_CASE("build_payoff_matrices: zero demand reduces to the O&M annuity pattern") {
    const ScenarioSet s = constant_scenario(5, 10, 0.0, 2.6, 400.0);
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);
    const auto [invest, expand] = build_payoff_matrices(s, c, DecisionWindows{});
    for (std::size_t w = 0; w < 5; ++w) {
        for (int y = 1; y <= 5; ++y) {
            CHECK(invest(w, y) == -om_charge(c, y, 10));
        }
        for (int y = 6; y <= 10; ++y) {
            CHECK(expand(w, y) == -om_charge(c, y, 10));
        }
    }
}

TEST_CASE("build_payoff_matrices: single deterministic path matches a hand computation") {
    const ScenarioSet s = ramp_scenario();
    const CostModel c = costs_with(600.0, 50000.0, 0.7, 100.0);
    const auto [invest, expand] = build_payoff_matrices(s, c, DecisionWindows{});

    const double margin = 600.0 - 0.7 * 800.0; // 40 $/kW
    for (int t = 1; t <= 5; ++t) {
        double om = 0.0;
        for (int k = 1; k <= 10 - t; ++k) om += 50000.0 / std::pow(1.06, k);
        double benefit = 0.0;
        for (int k = t + 1; k <= 10; ++k) {
            benefit += 2.0 * 0.3 * (100.0 + 10.0 * k) * 100.0 / std::pow(1.06, k - t);
        }
        CHECK(invest(0, t) == doctest::Approx(margin * (100.0 + 10.0 * t) - om + benefit)
                                  .epsilon(1e-12));
    }

    const double installed = 150.0; // demand at year 5 on the single path
    for (int t = 6; t <= 10; ++t) {
        const double inc = (100.0 + 10.0 * t) - installed;
        double om = 0.0;
        for (int k = 1; k <= 10 - t; ++k) om += 50000.0 / std::pow(1.06, k);
        double benefit = 0.0;
        for (int k = t + 1; k <= 10; ++k) {
            benefit += 2.0 * 0.3 * inc * 100.0 / std::pow(1.06, k - t);
        }
        CHECK(expand(0, t) == doctest::Approx(margin * inc - om + benefit).epsilon(1e-12));
    }
}

TEST_CASE("build_payoff_matrices: horizon must cover the expand window") {
    const ScenarioSet s = constant_scenario(3, 8, 100.0, 2.6, 400.0);
    CHECK_THROWS_AS(build_payoff_matrices(s, costs_with(600.0, 100000.0, 0.7, 65.0),
                                          DecisionWindows{}),
                    std::invalid_argument);
}

TEST_CASE("benchmark: mean year-1 investment payoff is negative") {
    const GbmParams d{0.015, 0.098};
    const MeanRevParams f{0.05, 2.6, 0.047};
    const RiskNeutralParams p{0.06, 0.09};
    const ScenarioSet s = simulate_scenario_set(d, 900.0, f, 1.8, p, 300.0, 10, 5000, 42);
    const auto [invest, expand] =
        build_payoff_matrices(s, costs_with(600.0, 100000.0, 0.7, 65.0), DecisionWindows{});
    double mean = 0.0;
    for (std::size_t w = 0; w < s.n_paths(); ++w) mean += invest(w, 1);
    mean /= static_cast<double>(s.n_paths());
    CHECK(mean < 0.0);
}

TEST_CASE("serial reference: payoff matrices are bit-identical") {
    const GbmParams d{0.015, 0.098};
    const MeanRevParams f{0.05, 2.6, 0.047};
    const RiskNeutralParams p{0.06, 0.09};
    const ScenarioSet s = simulate_scenario_set(d, 900.0, f, 1.8, p, 300.0, 10, 3000, 15);
    const CostModel c = costs_with(600.0, 100000.0, 0.7, 65.0);
    const auto [pi, pe] = build_payoff_matrices(s, c, DecisionWindows{});
    const auto [si, se] = serial::build_payoff_matrices(s, c, DecisionWindows{});
    CHECK(pi.values == si.values);
    CHECK(pe.values == se.values);
}

TEST_CASE("payoff csv export") {
    const ScenarioSet s = ramp_scenario();
    const auto [invest, expand] =
        build_payoff_matrices(s, costs_with(600.0, 50000.0, 0.7, 100.0), DecisionWindows{});
    std::stringstream ss;
    invest.write_csv(ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "path,year,payoff");
    std::getline(ss, line);
    CHECK(line.rfind("0,1,", 0) == 0);
}
