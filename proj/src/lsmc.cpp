#include "rov/lsmc.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "rov/errors.hpp"
#include "rov/parallel.hpp"

namespace rov {

namespace {

constexpr std::size_t kMaxBasis = 64;

// Shared basis evaluation so the Gram assembly and RegressionFit::evaluate
// produce bit-identical values for the same state triple.
void eval_basis(const BasisSpec& spec, double x0, double x1, double x2, double* out) {
    std::size_t k = 0;
    if (spec.include_intercept) {
        out[k++] = 1.0;
    }
    const double xs[3] = {x0, x1, x2};
    for (double x : xs) {
        double p = 1.0;
        for (int d = 1; d <= spec.max_degree; ++d) {
            p *= x;
            out[k++] = p;
        }
    }
    if (spec.include_cross_terms) {
        out[k++] = x0 * x1;
        out[k++] = x0 * x2;
        out[k++] = x1 * x2;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

std::vector<BasisSpec> fallback_ladder(const BasisSpec& spec) {
    std::vector<BasisSpec> ladder;
    BasisSpec s = spec;
    ladder.push_back(s);
    if (s.include_cross_terms) {
        s.include_cross_terms = false;
        ladder.push_back(s);
    }
    while (s.max_degree > 1) {
        --s.max_degree;
        ladder.push_back(s);
    }
    if (s.include_intercept) {
        s.max_degree = 0;
        ladder.push_back(s);
    }
    return ladder;
}

} // namespace

void BasisSpec::validate() const {
    if (max_degree < 1) {
        throw std::invalid_argument("BasisSpec: max_degree must be >= 1");
    }
    if (count() > kMaxBasis) {
        throw std::invalid_argument("BasisSpec: basis too large");
    }
}

double RegressionFit::evaluate(double x0, double x1, double x2) const {
    if (skipped || terminal || exact || coefficients.empty()) {
        return 0.0;
    }
    double phi[kMaxBasis];
    eval_basis(basis_used, x0, x1, x2, phi);
    return dot(coefficients.data(), phi, coefficients.size());
}

RegressionFit regress_continuation(std::span<const double> states,
                                   std::span<const double> discounted_future,
                                   std::span<const unsigned char> itm_mask,
                                   const BasisSpec& basis) {
    basis.validate();
    const std::size_t n = discounted_future.size();
    if (states.size() != 3 * n || itm_mask.size() != n) {
        throw std::invalid_argument("regress_continuation: input sizes disagree");
    }

    RegressionFit fit;
    fit.n_itm = par::block_count_if(n, [&](std::size_t i) { return itm_mask[i] != 0; });

    if (fit.n_itm < 2) {
        fit.skipped = true;
        fit.basis_used = basis;
        return fit;
    }

    fit.basis_used = basis;
    bool found = false;
    for (const BasisSpec& cand : fallback_ladder(basis)) {
        if (cand.count() <= fit.n_itm) {
            fit.basis_used = cand;
            found = true;
            break;
        }
    }
    if (!found) {
        fit.skipped = true;
        return fit;
    }

    const BasisSpec& used = fit.basis_used;
    const std::size_t J = used.count();
    const std::size_t tri = J * (J + 1) / 2; // lower triangle, row-major

    // Per-block partial normal equations, combined in block order so the
    // result does not depend on the thread count.
    const std::size_t n_blocks = par::block_count(n);
    std::vector<double> partial(n_blocks * (tri + J), 0.0);
    par::parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        double* gram = partial.data() + b * (tri + J);
        double* rhs = gram + tri;
        double phi[kMaxBasis];
        for (std::size_t i = lo; i < hi; ++i) {
            if (!itm_mask[i]) continue;
            eval_basis(used, states[3 * i], states[3 * i + 1], states[3 * i + 2], phi);
            const double y = discounted_future[i];
            std::size_t k = 0;
            for (std::size_t row = 0; row < J; ++row) {
                for (std::size_t col = 0; col <= row; ++col) {
                    gram[k++] += phi[row] * phi[col];
                }
                rhs[row] += phi[row] * y;
            }
        }
    });

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(J),
                                                 static_cast<Eigen::Index>(J));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(J));
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const double* g = partial.data() + b * (tri + J);
        std::size_t k = 0;
        for (std::size_t row = 0; row < J; ++row) {
            for (std::size_t col = 0; col <= row; ++col) {
                gram(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += g[k++];
            }
            rhs(static_cast<Eigen::Index>(row)) += g[tri + row];
        }
    }
    for (std::size_t row = 0; row < J; ++row) {
        for (std::size_t col = row + 1; col < J; ++col) {
            gram(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                gram(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(row));
        }
    }

    // Diagonal equilibration: an exact reparameterization that tames the
    // wildly different scales of raw polynomial terms, solved by a
    // rank-revealing decomposition so collinear bases get the minimum-norm
    // solution.
    Eigen::VectorXd scale(static_cast<Eigen::Index>(J));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(J); ++j) {
        const double d = gram(j, j);
        scale(j) = d > 0.0 ? std::sqrt(d) : 1.0;
    }
    Eigen::MatrixXd ge = gram;
    Eigen::VectorXd re = rhs;
    for (Eigen::Index i = 0; i < ge.rows(); ++i) {
        for (Eigen::Index j = 0; j < ge.cols(); ++j) {
            ge(i, j) /= scale(i) * scale(j);
        }
        re(i) /= scale(i);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ge);
    Eigen::VectorXd ce = cod.solve(re);
    fit.rank_deficient = cod.rank() < static_cast<Eigen::Index>(J);

    fit.coefficients.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double c = ce(static_cast<Eigen::Index>(j)) / scale(static_cast<Eigen::Index>(j));
        if (!std::isfinite(c)) {
            throw NumericError("regress_continuation: non-finite coefficient");
        }
        fit.coefficients[j] = c;
    }

    const double ss = par::block_sum(n, [&](std::size_t i) {
        if (!itm_mask[i]) return 0.0;
        const double resid = discounted_future[i] -
                             fit.evaluate(states[3 * i], states[3 * i + 1], states[3 * i + 2]);
        return resid * resid;
    });
    fit.residual_norm = std::sqrt(ss);
    return fit;
}

namespace {

struct InductInputs {
    const PayoffMatrix& pay;
    const ScenarioSet& scenario;
    YearRange window;
    const BasisSpec& basis;
    double r;
    SolveOptions opts;
    const std::vector<double>* bonus; // n x window.size(), nullptr when absent
};

OptionSolution induct(const InductInputs& in) {
    const PayoffMatrix& pay = in.pay;
    const YearRange window = in.window;
    window.validate("lsmc window");
    in.basis.validate();
    if (window.first < pay.window.first || window.last > pay.window.last) {
        throw std::invalid_argument("lsmc: payoff matrix does not cover the window");
    }
    if (pay.n_paths != in.scenario.n_paths()) {
        throw std::invalid_argument("lsmc: payoff matrix and scenario disagree on paths");
    }
    if (static_cast<int>(in.scenario.n_steps()) < window.last) {
        throw std::invalid_argument("lsmc: scenario horizon does not cover the window");
    }
    if (in.opts.exact_continuation && pay.n_paths > in.basis.count()) {
        throw std::invalid_argument("lsmc: exact continuation mode is restricted to n_paths <= basis count");
    }

    const std::size_t n = pay.n_paths;
    const double dt = in.scenario.dt();
    const std::size_t win_size = static_cast<std::size_t>(window.size());

    const auto exercise_value = [&](std::size_t w, int y) {
        const double base = pay(w, y);
        return in.bonus ? base + (*in.bonus)[w * win_size + static_cast<std::size_t>(y - window.first)]
                        : base;
    };

    OptionSolution sol;
    sol.window = window;
    sol.dt = dt;
    sol.n_paths = n;
    sol.stopping_time.assign(n, -1);
    sol.exercised.assign(n, 0);
    sol.exercise_value.assign(n, 0.0);
    sol.fits.resize(win_size);

    // Terminal year: exercise iff the payoff is strictly positive.
    {
        const int y = window.last;
        par::parallel_for(n, [&](std::size_t w) {
            const double g = exercise_value(w, y);
            if (g > 0.0) {
                sol.stopping_time[w] = y;
                sol.exercise_value[w] = g;
            }
        });
        sol.fits[win_size - 1].terminal = true;
        sol.fits[win_size - 1].basis_used = in.basis;
    }

    std::vector<double> g(n), target(n), states(3 * n);
    std::vector<unsigned char> itm(n);

    for (int t = window.last - 1; t >= window.first; --t) {
        const auto ts = static_cast<std::size_t>(t);
        par::parallel_for(n, [&](std::size_t w) {
            g[w] = exercise_value(w, t);
            itm[w] = g[w] > 0.0 ? 1 : 0;
            // Pathwise realized continuation target: discounted future cash
            // flow under the current (later-year) policy.
            target[w] = sol.stopping_time[w] >= 0
                            ? std::exp(-in.r * dt * (sol.stopping_time[w] - t)) * sol.exercise_value[w]
                            : 0.0;
            states[3 * w] = in.scenario.demand(w, ts);
            states[3 * w + 1] = in.scenario.fuel(w, ts);
            states[3 * w + 2] = in.scenario.pv_cost(w, ts);
        });

        RegressionFit fit;
        if (in.opts.exact_continuation) {
            fit.exact = true;
            fit.basis_used = in.basis;
            fit.n_itm = par::block_count_if(n, [&](std::size_t i) { return itm[i] != 0; });
        } else {
            fit = regress_continuation(states, target, itm, in.basis);
        }

        par::parallel_for(n, [&](std::size_t w) {
            if (!itm[w]) return;
            const double continuation =
                in.opts.exact_continuation
                    ? target[w]
                    : fit.evaluate(states[3 * w], states[3 * w + 1], states[3 * w + 2]);
            if (g[w] >= continuation) {
                sol.stopping_time[w] = t;
                sol.exercise_value[w] = g[w];
            }
        });
        sol.fits[static_cast<std::size_t>(t - window.first)] = std::move(fit);
    }

    par::parallel_for(n, [&](std::size_t w) { sol.exercised[w] = sol.stopping_time[w] >= 0 ? 1 : 0; });
    sol.value = par::block_sum(n, [&](std::size_t w) {
                    return sol.stopping_time[w] >= 0
                               ? std::exp(-in.r * dt * sol.stopping_time[w]) * sol.exercise_value[w]
                               : 0.0;
                }) /
                static_cast<double>(n);
    if (!std::isfinite(sol.value)) {
        throw NumericError("lsmc: option value is not finite");
    }
    return sol;
}

} // namespace

OptionSolution solve_single_option(const PayoffMatrix& payoffs, const ScenarioSet& scenario,
                                   YearRange window, const BasisSpec& basis, double r,
                                   const SolveOptions& opts) {
    return induct({payoffs, scenario, window, basis, r, opts, nullptr});
}

CompoundSolution solve_compound(const PayoffMatrix& invest_payoffs,
                                const PayoffMatrix& expand_payoffs, const ScenarioSet& scenario,
                                const DecisionWindows& windows, const BasisSpec& basis, double r,
                                const SolveOptions& opts, ExpansionValueMode mode) {
    windows.validate();
    if (invest_payoffs.n_paths != expand_payoffs.n_paths) {
        throw std::invalid_argument("solve_compound: payoff matrices disagree on paths");
    }

    CompoundSolution out;
    out.expansion = induct({expand_payoffs, scenario, windows.expand, basis, r, opts, nullptr});

    const std::size_t n = invest_payoffs.n_paths;
    const double dt = scenario.dt();

    // Present value (at time 0) of each path's realized expansion cash flow.
    std::vector<double> expansion_pv0(n, 0.0);
    par::parallel_for(n, [&](std::size_t w) {
        if (out.expansion.stopping_time[w] >= 0) {
            expansion_pv0[w] = std::exp(-r * dt * out.expansion.stopping_time[w]) *
                               out.expansion.exercise_value[w];
        }
    });

    const std::size_t win_size = static_cast<std::size_t>(windows.invest.size());
    std::vector<double> bonus(n * win_size, 0.0);
    if (mode == ExpansionValueMode::pathwise) {
        par::parallel_for(n, [&](std::size_t w) {
            for (int t = windows.invest.first; t <= windows.invest.last; ++t) {
                bonus[w * win_size + static_cast<std::size_t>(t - windows.invest.first)] =
                    expansion_pv0[w] == 0.0 ? 0.0 : expansion_pv0[w] * std::exp(r * dt * t);
            }
        });
    } else {
        std::vector<double> states(3 * n), target(n);
        std::vector<unsigned char> all(n, 1);
        out.expansion_value_fits.resize(win_size);
        for (int t = windows.invest.first; t <= windows.invest.last; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            par::parallel_for(n, [&](std::size_t w) {
                states[3 * w] = scenario.demand(w, ts);
                states[3 * w + 1] = scenario.fuel(w, ts);
                states[3 * w + 2] = scenario.pv_cost(w, ts);
                target[w] = expansion_pv0[w] == 0.0 ? 0.0 : expansion_pv0[w] * std::exp(r * dt * t);
            });
            RegressionFit fit = regress_continuation(states, target, all, basis);
            par::parallel_for(n, [&](std::size_t w) {
                const double fitted =
                    fit.evaluate(states[3 * w], states[3 * w + 1], states[3 * w + 2]);
                bonus[w * win_size + static_cast<std::size_t>(t - windows.invest.first)] =
                    fitted > 0.0 ? fitted : 0.0;
            });
            out.expansion_value_fits[static_cast<std::size_t>(t - windows.invest.first)] =
                std::move(fit);
        }
    }

    out.deferral = induct({invest_payoffs, scenario, windows.invest, basis, r, opts, &bonus});

    out.per_path_expansion_value.assign(n, 0.0);
    par::parallel_for(n, [&](std::size_t w) {
        const int tau = out.deferral.stopping_time[w];
        if (tau >= 0) {
            out.per_path_expansion_value[w] =
                bonus[w * win_size + static_cast<std::size_t>(tau - windows.invest.first)];
        }
    });
    return out;
}

double FrequencyDistribution::fraction_at(int year) const {
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] == year) return fractions[i];
    }
    return 0.0;
}

FrequencyDistribution exercise_frequency(const OptionSolution& solution) {
    FrequencyDistribution dist;
    const std::size_t n = solution.n_paths;
    const std::size_t win_size = static_cast<std::size_t>(solution.window.size());
    std::vector<std::size_t> counts(win_size, 0);
    std::size_t never = 0;
    for (std::size_t w = 0; w < n; ++w) {
        const int tau = solution.stopping_time[w];
        if (tau < 0) {
            ++never;
        } else {
            ++counts[static_cast<std::size_t>(tau - solution.window.first)];
        }
    }
    dist.years.resize(win_size);
    dist.fractions.resize(win_size);
    std::size_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < win_size; ++i) {
        dist.years[i] = solution.window.first + static_cast<int>(i);
        dist.fractions[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        if (counts[i] > 0 && (!any || counts[i] > counts[best])) {
            best = i;
            any = true;
        }
    }
    dist.never_fraction = static_cast<double>(never) / static_cast<double>(n);
    if (any) {
        dist.modal_year = dist.years[best];
    }
    return dist;
}

} // namespace rov
