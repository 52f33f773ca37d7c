#include "rov/processes.hpp"

#include <cmath>
#include <stdexcept>

#include "rov/parallel.hpp"
#include "rov/rng.hpp"

namespace rov {

void GbmParams::validate() const {
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("GbmParams: mu must be finite");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("GbmParams: sigma must be >= 0");
    }
}

void MeanRevParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("MeanRevParams: beta must be > 0");
    }
    if (!(s_bar > 0.0) || !std::isfinite(s_bar)) {
        throw std::invalid_argument("MeanRevParams: s_bar must be > 0");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("MeanRevParams: sigma must be >= 0");
    }
}

void RiskNeutralParams::validate() const {
    if (!std::isfinite(r)) {
        throw std::invalid_argument("RiskNeutralParams: r must be finite");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("RiskNeutralParams: sigma must be >= 0");
    }
}

bool Correlation3::is_identity() const {
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (m[i][j] != (i == j ? 1.0 : 0.0)) return false;
        }
    }
    return true;
}

void Correlation3::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (m[i][i] != 1.0) {
            throw std::invalid_argument("Correlation3: diagonal entries must be 1");
        }
        for (int j = 0; j < 3; ++j) {
            if (!std::isfinite(m[i][j]) || std::abs(m[i][j]) > 1.0 || m[i][j] != m[j][i]) {
                throw std::invalid_argument("Correlation3: matrix must be symmetric with entries in [-1,1]");
            }
        }
    }
    (void)cholesky();
}

std::array<std::array<double, 3>, 3> Correlation3::cholesky() const {
    std::array<std::array<double, 3>, 3> l{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m[i][j];
            for (int k = 0; k < j; ++k) {
                s -= l[i][k] * l[j][k];
            }
            if (i == j) {
                if (!(s > 0.0)) {
                    throw std::invalid_argument("Correlation3: matrix is not positive definite");
                }
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

namespace {

void check_common(double s0, std::size_t n_steps, std::size_t n_paths) {
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw std::invalid_argument("simulate: s0 must be positive");
    }
    if (n_steps == 0) {
        throw std::invalid_argument("simulate: n_steps must be >= 1");
    }
    if (n_paths == 0) {
        throw std::invalid_argument("simulate: n_paths must be >= 1");
    }
}

PathMatrix simulate_lognormal(double drift_rate, double sigma, double s0, std::size_t n_steps,
                              std::size_t n_paths, std::uint64_t seed, double dt) {
    check_common(s0, n_steps, n_paths);
    PathMatrix out(n_paths, n_steps, dt, s0, seed);
    const double drift = (drift_rate - 0.5 * sigma * sigma) * dt;
    const double vol = sigma * std::sqrt(dt);
    par::parallel_for(n_paths, [&](std::size_t w) {
        PathRng rng(seed, w);
        double* r = out.row(w);
        double s = s0;
        r[0] = s0;
        for (std::size_t t = 1; t <= n_steps; ++t) {
            s *= std::exp(drift + vol * rng.next_normal());
            r[t] = s;
        }
    });
    return out;
}

} // namespace

PathMatrix simulate_gbm(const GbmParams& params, double s0, std::size_t n_steps,
                        std::size_t n_paths, std::uint64_t seed, double dt) {
    params.validate();
    return simulate_lognormal(params.mu, params.sigma, s0, n_steps, n_paths, seed, dt);
}

PathMatrix simulate_risk_neutral_gbm(const RiskNeutralParams& params, double s0,
                                     std::size_t n_steps, std::size_t n_paths,
                                     std::uint64_t seed, double dt) {
    params.validate();
    return simulate_lognormal(params.r, params.sigma, s0, n_steps, n_paths, seed, dt);
}

PathMatrix simulate_mean_reverting(const MeanRevParams& params, double s0, std::size_t n_steps,
                                   std::size_t n_paths, std::uint64_t seed, double dt,
                                   double floor) {
    params.validate();
    check_common(s0, n_steps, n_paths);
    if (floor < 0.0) {
        floor = 1e-6 * params.s_bar;
    }
    PathMatrix out(n_paths, n_steps, dt, s0, seed);
    const double pull = std::exp(-params.beta * dt);
    const double noise =
        params.sigma * std::sqrt((1.0 - std::exp(-2.0 * params.beta * dt)) / (2.0 * params.beta));

    std::vector<std::size_t> clamps(par::block_count(n_paths), 0);
    par::parallel_blocks(n_paths, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::size_t clamped = 0;
        for (std::size_t w = lo; w < hi; ++w) {
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
        clamps[b] = clamped;
    });
    std::size_t total = 0;
    for (std::size_t c : clamps) total += c;
    out.set_clamp_count(total);
    return out;
}

ScenarioSet simulate_scenario_set(const GbmParams& demand, double demand_s0,
                                  const MeanRevParams& fuel, double fuel_s0,
                                  const RiskNeutralParams& pv, double pv_s0,
                                  std::size_t n_steps, std::size_t n_paths, std::uint64_t seed,
                                  const Correlation3& corr, double dt) {
    demand.validate();
    fuel.validate();
    pv.validate();
    corr.validate();
    check_common(demand_s0, n_steps, n_paths);
    check_common(fuel_s0, n_steps, n_paths);
    check_common(pv_s0, n_steps, n_paths);

    PathMatrix d(n_paths, n_steps, dt, demand_s0, seed);
    PathMatrix f(n_paths, n_steps, dt, fuel_s0, seed);
    PathMatrix p(n_paths, n_steps, dt, pv_s0, seed);

    const auto l = corr.cholesky();
    const bool identity = corr.is_identity();

    const double d_drift = (demand.mu - 0.5 * demand.sigma * demand.sigma) * dt;
    const double d_vol = demand.sigma * std::sqrt(dt);
    const double f_pull = std::exp(-fuel.beta * dt);
    const double f_noise =
        fuel.sigma * std::sqrt((1.0 - std::exp(-2.0 * fuel.beta * dt)) / (2.0 * fuel.beta));
    const double f_floor = 1e-6 * fuel.s_bar;
    const double p_drift = (pv.r - 0.5 * pv.sigma * pv.sigma) * dt;
    const double p_vol = pv.sigma * std::sqrt(dt);

    std::vector<std::size_t> clamps(par::block_count(n_paths), 0);
    par::parallel_blocks(n_paths, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::size_t clamped = 0;
        for (std::size_t w = lo; w < hi; ++w) {
            PathRng rng(seed, w);
            double* dr = d.row(w);
            double* fr = f.row(w);
            double* pr = p.row(w);
            double sd = demand_s0, sf = fuel_s0, sp = pv_s0;
            for (std::size_t t = 1; t <= n_steps; ++t) {
                double z0 = rng.next_normal();
                double z1 = rng.next_normal();
                double z2 = rng.next_normal();
                if (!identity) {
                    const double c0 = l[0][0] * z0;
                    const double c1 = l[1][0] * z0 + l[1][1] * z1;
                    const double c2 = l[2][0] * z0 + l[2][1] * z1 + l[2][2] * z2;
                    z0 = c0;
                    z1 = c1;
                    z2 = c2;
                }
                sd *= std::exp(d_drift + d_vol * z0);
                sf = f_pull * (sf - fuel.s_bar) + fuel.s_bar + f_noise * z1;
                if (sf < f_floor) {
                    sf = f_floor;
                    ++clamped;
                }
                sp *= std::exp(p_drift + p_vol * z2);
                dr[t] = sd;
                fr[t] = sf;
                pr[t] = sp;
            }
        }
        clamps[b] = clamped;
    });
    std::size_t total = 0;
    for (std::size_t c : clamps) total += c;
    f.set_clamp_count(total);

    return build_scenario_set(std::move(d), std::move(f), std::move(p));
}

} // namespace rov
