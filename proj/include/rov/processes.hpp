#pragma once

#include <array>
#include <cstdint>

#include "rov/path_matrix.hpp"

namespace rov {

struct GbmParams {
    double mu = 0.0;    // percentage drift per year
    double sigma = 0.0; // percentage volatility per sqrt-year

    void validate() const;
};

struct MeanRevParams {
    double beta = 0.0;  // reversion speed per year, > 0
    double s_bar = 0.0; // reversion level, > 0
    double sigma = 0.0; // volatility, >= 0

    void validate() const;
};

struct RiskNeutralParams {
    double r = 0.0;     // risk-free rate per year
    double sigma = 0.0; // volatility, >= 0

    void validate() const;
};

// Correlation between the per-step shocks of (demand, fuel, pv_cost).
// Defaults to the identity: the three variables are simulated independently.
struct Correlation3 {
    std::array<std::array<double, 3>, 3> m{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

    static Correlation3 identity() { return {}; }
    bool is_identity() const;
    // Lower Cholesky factor; throws if the matrix is not a valid correlation.
    std::array<std::array<double, 3>, 3> cholesky() const;
    void validate() const;
};

// S_{t+dt} = S_t * exp((mu - sigma^2/2) dt + sigma sqrt(dt) z).
// Identical seeds give bit-identical grids regardless of evaluation order.
PathMatrix simulate_gbm(const GbmParams& params, double s0, std::size_t n_steps,
                        std::size_t n_paths, std::uint64_t seed, double dt = 1.0);

// Exact AR(1) discretization:
// S_{t+dt} = e^{-beta dt}(S_t - s_bar) + s_bar + sigma eps sqrt((1-e^{-2 beta dt})/(2 beta)).
// Values are clamped at `floor` to keep prices positive (floor < 0 selects
// the default 1e-6 * s_bar); the number of clamped entries is recorded on
// the returned matrix.
PathMatrix simulate_mean_reverting(const MeanRevParams& params, double s0, std::size_t n_steps,
                                   std::size_t n_paths, std::uint64_t seed, double dt = 1.0,
                                   double floor = -1.0);

// GBM under the risk-neutral measure: drift r instead of mu.
PathMatrix simulate_risk_neutral_gbm(const RiskNeutralParams& params, double s0,
                                     std::size_t n_steps, std::size_t n_paths,
                                     std::uint64_t seed, double dt = 1.0);

// Joint simulation of the three state variables on shared path indices.
// Each (path, step) consumes three normals in a fixed order (demand, fuel,
// pv_cost) from one per-path stream, so sweeping any parameter reuses the
// same shocks (common random numbers). `corr` couples the shocks via its
// Cholesky factor.
ScenarioSet simulate_scenario_set(const GbmParams& demand, double demand_s0,
                                  const MeanRevParams& fuel, double fuel_s0,
                                  const RiskNeutralParams& pv, double pv_s0,
                                  std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                                  const Correlation3& corr = Correlation3::identity(),
                                  double dt = 1.0);

} // namespace rov
