#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rov {

enum class PowerUnit { kw, mva };

// One metered sample; power is in the unit declared by the file header.
struct LoadRecord {
    std::int64_t epoch_seconds = 0;
    double power = 0.0;
};

struct LoadSeries {
    std::vector<LoadRecord> records;
    PowerUnit unit = PowerUnit::kw;
};

// `# units: MVA` or `# units: kW` comment line, then a `timestamp,power`
// header and ISO-8601 rows. Timestamps must be strictly increasing.
LoadSeries read_load_csv(std::istream& is);

// `timestamp,price` rows (an optional `# units:` line is accepted and
// ignored). Returns the prices and the median spacing in years.
std::pair<std::vector<double>, double> read_price_csv(std::istream& is);

struct EnergyBucket {
    int year = 0;
    int month = 0;
    int day = 0; // 0 for monthly buckets
    double kwh = 0.0;
    int days_included = 0; // days contributing records (monthly buckets)
};

enum class Bucketing { daily, monthly };

struct OverLimitSeries {
    std::vector<EnergyBucket> buckets;
    std::size_t interpolated_records = 0;
    std::size_t excluded_days = 0;
    double base_interval_hours = 0.0;
};

// Energy above the thermal limit per bucket:
// sum of max(0, power - limit) * interval_hours, in kWh. The limit must be
// in the same unit as the series. Gaps shorter than 2 hours are filled by
// linear interpolation; longer gaps drop the affected days from the
// aggregation and are counted.
OverLimitSeries aggregate_over_limit(const LoadSeries& load, double thermal_limit,
                                     Bucketing bucket);

struct GbmEstimate {
    double mu = 0.0;
    double sigma = 0.0;
    double stderr_mu = 0.0;
    double stderr_sigma = 0.0;
    std::size_t n_obs = 0;
};

struct MeanRevEstimate {
    std::optional<double> beta; // empty when unidentifiable (constant series)
    double s_bar = 0.0;
    double sigma = 0.0;
    double stderr_beta = 0.0;
    double stderr_s_bar = 0.0;
    double stderr_sigma = 0.0;
    std::size_t n_obs = 0;
    bool beta_unidentifiable = false;
};

struct CalibrationResult {
    std::variant<GbmEstimate, MeanRevEstimate> estimate;
    double dt_years = 1.0;
    double last_value = 0.0;
};

// Closed-form MLE on log-returns:
// sigma_hat = stdev(log-returns)/sqrt(dt), mu_hat = mean/dt + sigma_hat^2/2.
CalibrationResult calibrate_gbm(std::span<const double> series, double dt_years);

// AR(1) OLS of S_{t+1} on S_t; beta_hat = -ln(b)/dt, s_bar_hat = a/(1-b),
// sigma_hat recovered from the residual variance through the exact
// discretization noise scale. Throws ModelFitError when the slope falls
// outside (0,1); a constant series yields an unidentifiable beta.
CalibrationResult calibrate_mean_reverting(std::span<const double> series, double dt_years);

// Capacity (kW) implied by a bucket's over-limit energy given a daily peak
// exposure duration.
double bucket_capacity_kw(const EnergyBucket& bucket, double peak_duration_hours_per_day);

} // namespace rov
