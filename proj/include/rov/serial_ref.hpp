#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rov/cashflow.hpp"
#include "rov/lsmc.hpp"
#include "rov/path_matrix.hpp"
#include "rov/processes.hpp"
#include "rov/windows.hpp"

// Single-threaded reference implementations of the data-parallel kernels.
// Tests pin the OpenMP kernels against these; the bench target compares
// their run times. The simulators and payoff builder must match the
// parallel kernels bit for bit. The least-squares reference solves the
// problem by a direct QR on the tall design matrix instead of normal
// equations, so it agrees only to rounding, which makes it an independent
// numerical check rather than a copy.
namespace rov::serial {

PathMatrix simulate_gbm(const GbmParams& params, double s0, std::size_t n_steps,
                        std::size_t n_paths, std::uint64_t seed, double dt = 1.0);

PathMatrix simulate_mean_reverting(const MeanRevParams& params, double s0, std::size_t n_steps,
                                   std::size_t n_paths, std::uint64_t seed, double dt = 1.0,
                                   double floor = -1.0);

PathMatrix simulate_risk_neutral_gbm(const RiskNeutralParams& params, double s0,
                                     std::size_t n_steps, std::size_t n_paths,
                                     std::uint64_t seed, double dt = 1.0);

std::pair<PayoffMatrix, PayoffMatrix> build_payoff_matrices(const ScenarioSet& scenario,
                                                            const CostModel& cost,
                                                            const DecisionWindows& windows);

// Direct least squares (QR on the design matrix) over the ITM rows.
// Returns coefficients for the same basis layout as regress_continuation.
std::vector<double> regress_continuation_direct(std::span<const double> states,
                                                std::span<const double> discounted_future,
                                                std::span<const unsigned char> itm_mask,
                                                const BasisSpec& basis);

} // namespace rov::serial
