#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rov/cashflow.hpp"
#include "rov/path_matrix.hpp"
#include "rov/windows.hpp"

namespace rov {

// Polynomial regression basis over the three state variables. Layout of the
// basis vector: optional intercept, then per-variable powers x_i^1..x_i^d
// grouped by variable, then the pairwise products x0*x1, x0*x2, x1*x2 when
// cross terms are enabled. max_degree 0 (intercept only) appears only as an
// internal fallback.
struct BasisSpec {
    int max_degree = 2;
    bool include_cross_terms = true;
    bool include_intercept = true;

    std::size_t count() const {
        return (include_intercept ? 1u : 0u) + 3u * static_cast<std::size_t>(max_degree) +
               (include_cross_terms ? 3u : 0u);
    }
    void validate() const;

    bool operator==(const BasisSpec&) const = default;
};

// One cross-sectional regression of discounted future cash flows on the
// basis functions of the current states, fitted over in-the-money paths.
struct RegressionFit {
    std::vector<double> coefficients; // one per basis function of basis_used
    double residual_norm = 0.0;       // sqrt of the sum of squared residuals
    std::size_t n_itm = 0;
    BasisSpec basis_used;
    bool rank_deficient = false; // solved by minimum-norm least squares
    bool skipped = false;        // fewer than 2 ITM paths: continuation is 0
    bool terminal = false;       // terminal year, no regression happens
    bool exact = false;          // per-path exact continuation (test mode)

    // Fitted continuation value at a state triple; 0 when skipped/terminal.
    double evaluate(double x0, double x1, double x2) const;
};

// states: n interleaved triples (x0,x1,x2); discounted_future and itm_mask
// have length n. Falls back to smaller bases when ITM paths are scarce
// (drop cross terms, then lower the degree, then intercept only); with
// fewer than 2 ITM paths the continuation is defined as 0 and no
// regression happens. Rank-deficient designs are solved by minimum-norm
// least squares and flagged.
RegressionFit regress_continuation(std::span<const double> states,
                                   std::span<const double> discounted_future,
                                   std::span<const unsigned char> itm_mask,
                                   const BasisSpec& basis);

struct SolveOptions {
    // Replaces the regression with per-path realized continuation values
    // (perfect foresight). Only for tiny oracle comparisons; allowed only
    // when n_paths <= basis count.
    bool exact_continuation = false;
};

struct OptionSolution {
    double value = 0.0;                   // option value at t0
    std::vector<int> stopping_time;       // per path; -1 = never exercised
    std::vector<unsigned char> exercised; // per path
    std::vector<double> exercise_value;   // payoff (plus any downstream value) at tau
    std::vector<RegressionFit> fits;      // per window year, index year - window.first
    YearRange window;
    double dt = 1.0;
    std::size_t n_paths = 0;
};

// Longstaff-Schwartz backward induction over one decision window. At the
// terminal year a path exercises iff its payoff is strictly positive; at
// earlier years in-the-money paths exercise when the payoff is >= the
// fitted continuation value (ties exercise). The option value is the path
// average of e^{-r dt tau} * payoff(tau) with never-exercised paths
// contributing zero.
OptionSolution solve_single_option(const PayoffMatrix& payoffs, const ScenarioSet& scenario,
                                   YearRange window, const BasisSpec& basis, double r,
                                   const SolveOptions& opts = {});

// How the expansion option's value enters the deferral exercise rule:
// pathwise uses each path's realized expansion cash flow discounted to the
// deferral year; regressed replaces it with a cross-sectional fit on the
// deferral-year states (floored at zero).
enum class ExpansionValueMode { pathwise, regressed };

struct CompoundSolution {
    OptionSolution deferral;  // F_h
    OptionSolution expansion; // F_{h+1}
    // Expansion value credited at each path's deferral exercise year
    // (0 for paths that never exercise the deferral option).
    std::vector<double> per_path_expansion_value;
    // Per deferral-year fits of the expansion value (regressed mode only).
    std::vector<RegressionFit> expansion_value_fits;
};

// Two-stage compound solve: the expansion option is valued first over its
// own window; its per-path value then augments both the deferral exercise
// test and the regression targets of the deferral induction.
CompoundSolution solve_compound(const PayoffMatrix& invest_payoffs,
                                const PayoffMatrix& expand_payoffs, const ScenarioSet& scenario,
                                const DecisionWindows& windows, const BasisSpec& basis, double r,
                                const SolveOptions& opts = {},
                                ExpansionValueMode mode = ExpansionValueMode::pathwise);

struct FrequencyDistribution {
    std::vector<int> years;        // window years in order
    std::vector<double> fractions; // fraction of paths stopping at each year
    double never_fraction = 0.0;
    std::optional<int> modal_year; // empty when no path exercises

    double fraction_at(int year) const;
};

FrequencyDistribution exercise_frequency(const OptionSolution& solution);

} // namespace rov
