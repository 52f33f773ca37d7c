#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <iostream>
#include <sstream>

#include "rov/config.hpp"
#include "rov/errors.hpp"
#include "rov/scenario.hpp"

using namespace rov;

namespace {

ScenarioConfig small_benchmark(std::size_t n_paths = 4000, std::uint64_t seed = 42) {
    ScenarioConfig cfg;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    return cfg;
}

double year5(const ScenarioReport& r) { return r.invest_frequency.fraction_at(5); }

} // namespace

TEST_CASE("run_valuation: benchmark sign pattern and report identity") {
    const ScenarioReport r = run_valuation(small_benchmark());
    CHECK(r.standard_npv < 0.0);
    CHECK(r.option_value > 0.0);
    CHECK(r.flexible_npv == r.standard_npv + r.option_value);
    CHECK(r.flexible_npv > r.standard_npv);
    CHECK(r.recommendation == "defer");
    REQUIRE(r.invest_frequency.modal_year.has_value());
    CHECK(*r.invest_frequency.modal_year == 5);
    CHECK(r.expansion_option_value > 0.0);

    double total = r.invest_frequency.never_fraction;
    for (double f : r.invest_frequency.fractions) total += f;
    CHECK(std::abs(total - 1.0) < 1e-12);

    // First-stage sizing and the 2 kWh per kW battery rule.
    CHECK(r.installed_capacity_kw > 0.0);
    CHECK(r.battery_energy_kwh == 2.0 * r.installed_capacity_kw);
}

TEST_CASE("run_valuation: worthless flat configuration is abandoned") {
    ScenarioConfig cfg = small_benchmark(500);
    cfg.demand.sigma = 0.0;
    cfg.demand.mu = 0.0;
    cfg.fuel.sigma = 0.0;
    cfg.pv.sigma = 0.0;
    cfg.demand_s0 = 1.0; // 1 kW of over-limit demand cannot carry the O&M
    const ScenarioReport r = run_valuation(cfg);
    CHECK(r.option_value == 0.0);
    CHECK(r.standard_npv < 0.0);
    CHECK(r.recommendation == "abandon");
    CHECK(r.invest_frequency.never_fraction == 1.0);
}

TEST_CASE("run_valuation: deterministic payoffs maximal at year 1 exercise immediately") {
    ScenarioConfig cfg = small_benchmark(200);
    cfg.demand.sigma = 0.0;
    cfg.demand.mu = 0.0;
    cfg.fuel.sigma = 0.0;
    cfg.pv.sigma = 0.0;
    cfg.fuel_s0 = 2.6;
    cfg.demand_s0 = 2000.0;
    cfg.costs.peak_hours = 1460.0; // large declining avoided-cost stream
    const ScenarioReport r = run_valuation(cfg);
    REQUIRE(r.invest_frequency.modal_year.has_value());
    CHECK(*r.invest_frequency.modal_year == 1);
    CHECK(r.invest_frequency.fraction_at(1) == 1.0);
    CHECK(r.standard_npv > 0.0);

    // Single deterministic world-state: brute force over exercise years says
    // year 1 is optimal, so the option value is the discounted year-1 payoff.
    const ScenarioSet s = simulate_scenario_set(cfg.demand, cfg.demand_s0, cfg.fuel, cfg.fuel_s0,
                                                cfg.pv, cfg.pv_s0, 10, 1, cfg.seed);
    const auto [invest, expand] = build_payoff_matrices(s, cfg.costs, cfg.windows);
    double best = 0.0;
    int best_year = -1;
    for (int y = 1; y <= 5; ++y) {
        const double v = std::exp(-0.06 * y) * invest(0, y);
        if (v > best) {
            best = v;
            best_year = y;
        }
    }
    CHECK(best_year == 1);
    CHECK(r.option_value == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.option_value == doctest::Approx(std::exp(-0.06) * r.standard_npv).epsilon(1e-12));
}

TEST_CASE("run_valuation: invalid configs are rejected with every violation listed") {
    ScenarioConfig cfg = small_benchmark();
    cfg.n_paths = 0;
    cfg.horizon = 7; // does not cover the expand window
    try {
        run_valuation(cfg);
        CHECK(false);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("n_paths") != std::string::npos);
        CHECK(msg.find("horizon") != std::string::npos);
    }
}

TEST_CASE("run_valuation: small path counts warn but run") {
    ScenarioConfig cfg = small_benchmark(50);
    std::stringstream captured;
    std::streambuf* old = std::cerr.rdbuf(captured.rdbuf());
    const ScenarioReport r = run_valuation(cfg);
    std::cerr.rdbuf(old);
    CHECK(r.n_paths == 50);
    CHECK(captured.str().find("below 100") != std::string::npos);
}

TEST_CASE("run_sensitivity: empty sweep returns only the base report") {
    const auto points = run_sensitivity(small_benchmark(1000), {});
    REQUIRE(points.size() == 1);
    CHECK(points[0].scenario_id == "S1");
    CHECK(points[0].description == "Benchmark");
}

TEST_CASE("run_sensitivity: unknown parameter names are rejected") {
    CHECK_THROWS_AS(run_sensitivity(small_benchmark(500), {{"mu_dd", {0.01}}}), ConfigError);
    ScenarioConfig cfg = small_benchmark(500);
    cfg.overrides["not_a_knob"] = 1.0;
    CHECK_THROWS_AS(run_valuation(cfg), ConfigError);
}

TEST_CASE("run_sensitivity: reports are seed-paired and reproducible") {
    const auto a = run_sensitivity(small_benchmark(2000), {{"mu_d", {0.01, 0.03}}});
    const auto b = run_sensitivity(small_benchmark(2000), {{"mu_d", {0.01, 0.03}}});
    REQUIRE(a.size() == 3);
    REQUIRE(b.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].report.standard_npv == b[i].report.standard_npv);
        CHECK(a[i].report.option_value == b[i].report.option_value);
        CHECK(a[i].report.invest_frequency.fractions == b[i].report.invest_frequency.fractions);
        CHECK(a[i].report.seed == 42);
    }
    CHECK(a[1].description == "mu_d = 1%");
    CHECK(a[2].description == "mu_d = 3%");
}

TEST_CASE("run_sensitivity: demand drift raises the deferral option value") {
    const auto pts = run_sensitivity(small_benchmark(10000), {{"mu_d", {0.01, 0.03, 0.05}}});
    REQUIRE(pts.size() == 4);
    CHECK(pts[1].report.option_value < pts[2].report.option_value);
    CHECK(pts[2].report.option_value < pts[3].report.option_value);
}

TEST_CASE("run_sensitivity: faster fuel reversion concentrates exercise in year 5") {
    const auto pts = run_sensitivity(small_benchmark(10000), {{"beta_f", {0.10, 0.15}}});
    const double base = year5(pts[0].report);
    CHECK(year5(pts[1].report) >= base);
    CHECK(year5(pts[2].report) >= year5(pts[1].report));
}

TEST_CASE("run_sensitivity: higher demand volatility spreads exercise earlier") {
    const auto pts = run_sensitivity(small_benchmark(10000), {{"sigma_d", {0.20}}});
    CHECK(year5(pts[1].report) < year5(pts[0].report));
}

TEST_CASE("compare_standalone_vs_compound: compounding adds strictly positive value") {
    const StandaloneComparison cmp = compare_standalone_vs_compound(small_benchmark());
    CHECK(cmp.standalone_value > 0.0);
    CHECK(cmp.compound_report.option_value > cmp.standalone_value);
    REQUIRE(cmp.standalone_frequency.modal_year.has_value());
    CHECK(*cmp.standalone_frequency.modal_year == 5);
}

TEST_CASE("compare_standalone_vs_compound: dead expansion collapses to equality") {
    ScenarioConfig cfg = small_benchmark(2000);
    cfg.overrides["mu_d"] = 0.0;
    cfg.overrides["sigma_d"] = 0.0; // flat demand: nothing left to expand
    const StandaloneComparison cmp = compare_standalone_vs_compound(cfg);
    CHECK(cmp.compound_report.option_value == cmp.standalone_value);
    CHECK(cmp.compound_report.expansion_option_value == 0.0);
}

TEST_CASE("config json: round trip, defaults, digest stability") {
    const ScenarioConfig cfg;
    const std::string text = config_to_json_text(cfg);
    const ScenarioConfig back = config_from_json_text(text);
    CHECK(back.demand_s0 == cfg.demand_s0);
    CHECK(back.fuel.beta == cfg.fuel.beta);
    CHECK(back.costs.peak_hours == cfg.costs.peak_hours);
    CHECK(back.n_paths == cfg.n_paths);
    CHECK(back.basis.max_degree == cfg.basis.max_degree);
    CHECK(config_digest(back) == config_digest(cfg));

    ScenarioConfig other;
    other.seed = 43;
    CHECK(config_digest(other) != config_digest(cfg));

    // Overrides participate in the digest through the resolved values.
    ScenarioConfig overridden;
    overridden.overrides["mu_d"] = 0.03;
    ScenarioConfig direct;
    direct.demand.mu = 0.03;
    CHECK(config_digest(overridden) == config_digest(direct));
}

TEST_CASE("config json: partial documents keep defaults, unknown keys rejected") {
    const ScenarioConfig cfg = config_from_json_text(R"({"run": {"n_paths": 777}})");
    CHECK(cfg.n_paths == 777);
    CHECK(cfg.demand_s0 == 900.0);

    CHECK_THROWS_AS(config_from_json_text(R"({"runs": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"costs": {"c_dgg": 1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"lsmc": {"expansion_value_mode": "x"}})"),
                    ConfigError);
}

TEST_CASE("sweep spec json parsing") {
    const auto sweeps = sweeps_from_json_text(
        R"({"sweeps": [{"param": "mu_d", "values": [0.01, 0.03]}, {"param": "sigma_pv", "values": [0.2]}]})");
    REQUIRE(sweeps.size() == 2);
    CHECK(sweeps[0].first == "mu_d");
    CHECK(sweeps[0].second.size() == 2);
    CHECK(sweeps[1].first == "sigma_pv");
    CHECK_THROWS_AS(sweeps_from_json_text(R"({"sweeps": [{"values": [1]}]})"), ConfigError);
    CHECK_THROWS_AS(sweeps_from_json_text(R"([])"), ConfigError);
}

TEST_CASE("report serialization: json fields and table csv shape") {
    const ScenarioReport r = run_valuation(small_benchmark(500));
    const std::string json_text = report_to_json_text(r);
    CHECK(json_text.find("\"standard_npv\"") != std::string::npos);
    CHECK(json_text.find("\"recommendation\"") != std::string::npos);
    CHECK(json_text.find("\"modal_year\"") != std::string::npos);

    const DecisionWindows win;
    const std::string header = report_csv_header(win);
    CHECK(header ==
          "scenario,description,year1_pct,year2_pct,year3_pct,year4_pct,year5_pct,"
          "standard_npv_k,rov_k,flexible_npv_k\n");
    const std::string row = report_csv_row(r, win);
    CHECK(row.rfind("S1,\"Benchmark\",", 0) == 0);
    // k$ with one decimal: the raw dollar value must not leak in.
    CHECK(row.find('.') != std::string::npos);
}

TEST_CASE("stopping time csv uses 'never' for unexercised paths") {
    ScenarioConfig cfg = small_benchmark(200);
    const ValuationArtifacts art = run_valuation_detailed(cfg);
    const std::string csv = stopping_times_csv(art.solution);
    CHECK(csv.rfind("path,tau_invest,tau_expand\n", 0) == 0);
    CHECK(csv.find("never") != std::string::npos);
}
