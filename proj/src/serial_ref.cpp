#include "rov/serial_ref.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "rov/rng.hpp"

namespace rov::serial {

PathMatrix simulate_gbm(const GbmParams& params, double s0, std::size_t n_steps,
                        std::size_t n_paths, std::uint64_t seed, double dt) {
    params.validate();
    if (!(s0 > 0.0)) throw std::invalid_argument("simulate: s0 must be positive");
    PathMatrix out(n_paths, n_steps, dt, s0, seed);
    const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
    const double vol = params.sigma * std::sqrt(dt);
    for (std::size_t w = 0; w < n_paths; ++w) {
        PathRng rng(seed, w);
        double* r = out.row(w);
        double s = s0;
        r[0] = s0;
        for (std::size_t t = 1; t <= n_steps; ++t) {
            s *= std::exp(drift + vol * rng.next_normal());
            r[t] = s;
        }
    }
    return out;
}

PathMatrix simulate_risk_neutral_gbm(const RiskNeutralParams& params, double s0,
                                     std::size_t n_steps, std::size_t n_paths,
                                     std::uint64_t seed, double dt) {
    params.validate();
    GbmParams g{params.r, params.sigma};
    return serial::simulate_gbm(g, s0, n_steps, n_paths, seed, dt);
}

PathMatrix simulate_mean_reverting(const MeanRevParams& params, double s0, std::size_t n_steps,
                                   std::size_t n_paths, std::uint64_t seed, double dt,
                                   double floor) {
    params.validate();
    if (!(s0 > 0.0)) throw std::invalid_argument("simulate: s0 must be positive");
    if (floor < 0.0) floor = 1e-6 * params.s_bar;
    PathMatrix out(n_paths, n_steps, dt, s0, seed);
    const double pull = std::exp(-params.beta * dt);
    const double noise =
        params.sigma * std::sqrt((1.0 - std::exp(-2.0 * params.beta * dt)) / (2.0 * params.beta));
    std::size_t clamped = 0;
    for (std::size_t w = 0; w < n_paths; ++w) {
        PathRng rng(seed, w);
        double* r = out.row(w);
        double s = s0;
        r[0] = s0;
        for (std::size_t t = 1; t <= n_steps; ++t) {
            s = pull * (s - params.s_bar) + params.s_bar + noise * rng.next_normal();
            if (s < floor) {
                s = floor;
                ++clamped;
            }
            r[t] = s;
        }
    }
    out.set_clamp_count(clamped);
    return out;
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

    // Same sizing rule as the parallel builder: cross-path mean of the
    // demand state at the last invest year, accumulated in block order.
    const CapacityPlan plan = size_first_stage(scenario, windows);

    for (std::size_t w = 0; w < n; ++w) {
        for (int y = windows.invest.first; y <= windows.invest.last; ++y) {
            invest(w, y) = investment_payoff(scenario, cost, y, w);
        }
        for (int y = windows.expand.first; y <= windows.expand.last; ++y) {
            expand(w, y) = expansion_payoff(scenario, cost, plan, y, w);
        }
    }
    return {std::move(invest), std::move(expand)};
}

std::vector<double> regress_continuation_direct(std::span<const double> states,
                                                std::span<const double> discounted_future,
                                                std::span<const unsigned char> itm_mask,
                                                const BasisSpec& basis) {
    basis.validate();
    const std::size_t n = discounted_future.size();
    std::size_t n_itm = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (itm_mask[i]) ++n_itm;
    }
    const std::size_t J = basis.count();
    if (n_itm < J) {
        throw std::invalid_argument("regress_continuation_direct: not enough ITM rows");
    }

    Eigen::MatrixXd a(static_cast<Eigen::Index>(n_itm), static_cast<Eigen::Index>(J));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n_itm));
    Eigen::Index row = 0;
    std::vector<double> phi(J);
    for (std::size_t i = 0; i < n; ++i) {
        if (!itm_mask[i]) continue;
        // Same basis layout as the production path.
        std::size_t k = 0;
        if (basis.include_intercept) phi[k++] = 1.0;
        const double xs[3] = {states[3 * i], states[3 * i + 1], states[3 * i + 2]};
        for (double x : xs) {
            double p = 1.0;
            for (int d = 1; d <= basis.max_degree; ++d) {
                p *= x;
                phi[k++] = p;
            }
        }
        if (basis.include_cross_terms) {
            phi[k++] = xs[0] * xs[1];
            phi[k++] = xs[0] * xs[2];
            phi[k++] = xs[1] * xs[2];
        }
        for (std::size_t j = 0; j < J; ++j) {
            a(row, static_cast<Eigen::Index>(j)) = phi[j];
        }
        y(row) = discounted_future[i];
        ++row;
    }

    Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(y);
    std::vector<double> out(J);
    for (std::size_t j = 0; j < J; ++j) {
        out[j] = c(static_cast<Eigen::Index>(j));
    }
    return out;
}

} // namespace rov::serial
