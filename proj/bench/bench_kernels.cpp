// Kernel benchmark: OpenMP implementations against the serial references,
// with an equality check on every comparison. Returns non-zero if any
// kernel disagrees with its reference.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rov/cashflow.hpp"
#include "rov/lsmc.hpp"
#include "rov/processes.hpp"
#include "rov/serial_ref.hpp"

using namespace rov;

namespace {

int g_mismatches = 0;

class Timer {
public:
    void start() { t0_ = std::chrono::steady_clock::now(); }
    double stop_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

void row(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-34s %10.1f %12.1f %8.2fx   %s\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "yes" : "NO");
    if (!identical) ++g_mismatches;
}

ScenarioSet benchmark_scenario(std::size_t n_paths) {
    return simulate_scenario_set({0.015, 0.098}, 900.0, {0.05, 2.6, 0.047}, 1.8, {0.06, 0.09},
                                 300.0, 10, n_paths, 42);
}

} // namespace

int main() {
    const std::size_t sim_paths = 200000;
    const std::size_t sim_steps = 50;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-34s %10s %12s %9s   %s\n", "kernel", "serial_ms", "parallel_ms", "speedup",
                "identical");

    Timer t;
    {
        t.start();
        const PathMatrix serial =
            serial::simulate_gbm({0.015, 0.098}, 900.0, sim_steps, sim_paths, 42);
        const double s_ms = t.stop_ms();
        t.start();
        const PathMatrix parallel = simulate_gbm({0.015, 0.098}, 900.0, sim_steps, sim_paths, 42);
        const double p_ms = t.stop_ms();
        row("simulate_gbm (200k x 50)", s_ms, p_ms, serial.values() == parallel.values());
    }
    {
        t.start();
        const PathMatrix serial =
            serial::simulate_mean_reverting({0.05, 2.6, 0.047}, 1.8, sim_steps, sim_paths, 42);
        const double s_ms = t.stop_ms();
        t.start();
        const PathMatrix parallel =
            simulate_mean_reverting({0.05, 2.6, 0.047}, 1.8, sim_steps, sim_paths, 42);
        const double p_ms = t.stop_ms();
        row("simulate_mean_reverting (200k x 50)", s_ms, p_ms,
            serial.values() == parallel.values() &&
                serial.clamp_count() == parallel.clamp_count());
    }

    const ScenarioSet scenario = benchmark_scenario(100000);
    CostModel costs;
    costs.peak_hours = 65.0;
    {
        t.start();
        const auto [si, se] = serial::build_payoff_matrices(scenario, costs, DecisionWindows{});
        const double s_ms = t.stop_ms();
        t.start();
        const auto [pi, pe] = build_payoff_matrices(scenario, costs, DecisionWindows{});
        const double p_ms = t.stop_ms();
        row("build_payoff_matrices (100k)", s_ms, p_ms,
            si.values == pi.values && se.values == pe.values);
    }
    {
        // One regression cross-section at year 3 of the benchmark scenario.
        const std::size_t n = scenario.n_paths();
        std::vector<double> states(3 * n), target(n);
        std::vector<unsigned char> itm(n);
        for (std::size_t w = 0; w < n; ++w) {
            states[3 * w] = scenario.demand(w, 3);
            states[3 * w + 1] = scenario.fuel(w, 3);
            states[3 * w + 2] = scenario.pv_cost(w, 3);
            target[w] = scenario.demand(w, 5) - scenario.pv_cost(w, 5);
            itm[w] = (w % 4) != 0;
        }
        t.start();
        const std::vector<double> direct =
            serial::regress_continuation_direct(states, target, itm, BasisSpec{});
        const double s_ms = t.stop_ms();
        t.start();
        const RegressionFit fit = regress_continuation(states, target, itm, BasisSpec{});
        const double p_ms = t.stop_ms();
        double max_diff = 0.0;
        for (std::size_t j = 0; j < direct.size(); ++j) {
            max_diff = std::max(max_diff, std::abs(direct[j] - fit.coefficients[j]) /
                                              std::max(1.0, std::abs(direct[j])));
        }
        // Normal equations vs direct QR agree to rounding, not bitwise.
        row("regress_continuation (100k, J=10)", s_ms, p_ms, max_diff < 1e-7);
    }
    {
        const ScenarioSet small = benchmark_scenario(10000);
        const auto [invest, expand] = build_payoff_matrices(small, costs, DecisionWindows{});
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        t.start();
        const CompoundSolution serial_sol =
            solve_compound(invest, expand, small, DecisionWindows{}, BasisSpec{}, 0.06);
        const double s_ms = t.stop_ms();
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
        t.start();
        const CompoundSolution parallel_sol =
            solve_compound(invest, expand, small, DecisionWindows{}, BasisSpec{}, 0.06);
        const double p_ms = t.stop_ms();
        row("solve_compound (10k, 1 thread vs N)", s_ms, p_ms,
            serial_sol.deferral.value == parallel_sol.deferral.value &&
                serial_sol.deferral.stopping_time == parallel_sol.deferral.stopping_time &&
                serial_sol.expansion.value == parallel_sol.expansion.value);
    }

    if (g_mismatches > 0) {
        std::printf("%d kernel(s) disagree with their reference\n", g_mismatches);
        return 1;
    }
    return 0;
}
