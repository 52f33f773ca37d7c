#include "rov/calibrate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

#include "rov/errors.hpp"

namespace rov {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

std::int64_t parse_timestamp(const std::string& text, long line) {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
        throw IngestError("bad timestamp '" + text + "'", line);
    }
    const auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
                throw IngestError("bad timestamp '" + text + "'", line);
            }
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    y = num(0, 4);
    mo = num(5, 2);
    d = num(8, 2);
    h = num(11, 2);
    mi = num(14, 2);
    if (text.size() >= 19 && text[16] == ':') {
        s = num(17, 2);
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
        throw IngestError("timestamp out of range '" + text + "'", line);
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

LoadSeries read_load_csv(std::istream& is) {
    LoadSeries out;
    bool unit_seen = false;
    bool header_seen = false;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto pos = lower(t).find("units:");
            if (pos != std::string::npos) {
                const std::string u = lower(trim(t.substr(pos + 6)));
                if (u == "mva") {
                    out.unit = PowerUnit::mva;
                } else if (u == "kw") {
                    out.unit = PowerUnit::kw;
                } else {
                    throw IngestError("unknown unit '" + u + "' (expected MVA or kW)", line_no);
                }
                unit_seen = true;
            }
            continue;
        }
        if (!header_seen) {
            if (lower(t).rfind("timestamp", 0) != 0) {
                throw IngestError("expected 'timestamp,power' header", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos) {
            throw IngestError("expected 'timestamp,power' row", line_no);
        }
        LoadRecord rec;
        rec.epoch_seconds = parse_timestamp(trim(t.substr(0, comma)), line_no);
        try {
            rec.power = std::stod(t.substr(comma + 1));
        } catch (const std::exception&) {
            throw IngestError("bad power value '" + t.substr(comma + 1) + "'", line_no);
        }
        if (!(rec.power >= 0.0) || !std::isfinite(rec.power)) {
            throw IngestError("power must be finite and >= 0", line_no);
        }
        if (!out.records.empty() && rec.epoch_seconds <= out.records.back().epoch_seconds) {
            throw IngestError("timestamps must be strictly increasing", line_no);
        }
        out.records.push_back(rec);
    }
    if (!unit_seen) {
        throw IngestError("missing '# units: MVA' or '# units: kW' header line");
    }
    if (out.records.empty()) {
        throw IngestError("load file contains no records");
    }
    return out;
}

std::pair<std::vector<double>, double> read_price_csv(std::istream& is) {
    std::vector<double> prices;
    std::vector<std::int64_t> times;
    bool header_seen = false;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (lower(t).rfind("timestamp", 0) != 0) {
                throw IngestError("expected 'timestamp,price' header", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos) {
            throw IngestError("expected 'timestamp,price' row", line_no);
        }
        const std::int64_t ts = parse_timestamp(trim(t.substr(0, comma)), line_no);
        double price = 0.0;
        try {
            price = std::stod(t.substr(comma + 1));
        } catch (const std::exception&) {
            throw IngestError("bad price value '" + t.substr(comma + 1) + "'", line_no);
        }
        if (!times.empty() && ts <= times.back()) {
            throw IngestError("timestamps must be strictly increasing", line_no);
        }
        times.push_back(ts);
        prices.push_back(price);
    }
    if (prices.size() < 2) {
        throw IngestError("price file needs at least two records");
    }
    std::vector<std::int64_t> gaps(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        gaps[i] = times[i + 1] - times[i];
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double dt_years = static_cast<double>(gaps[gaps.size() / 2]) / (365.25 * 86400.0);
    return {std::move(prices), dt_years};
}

OverLimitSeries aggregate_over_limit(const LoadSeries& load, double thermal_limit,
                                     Bucketing bucket) {
    if (load.records.empty()) {
        throw std::invalid_argument("aggregate_over_limit: no records");
    }
    if (!(thermal_limit > 0.0)) {
        throw std::invalid_argument("aggregate_over_limit: thermal_limit must be > 0");
    }
    const auto& recs = load.records;
    const double to_kw = load.unit == PowerUnit::mva ? 1000.0 : 1.0;

    // Base sampling interval: the most common positive spacing.
    std::int64_t base = 0;
    if (recs.size() == 1) {
        base = 15 * 60;
    } else {
        std::map<std::int64_t, std::size_t> freq;
        for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
            ++freq[recs[i + 1].epoch_seconds - recs[i].epoch_seconds];
        }
        std::size_t best = 0;
        for (const auto& [gap, count] : freq) {
            if (count > best) {
                best = count;
                base = gap;
            }
        }
    }

    OverLimitSeries out;
    out.base_interval_hours = static_cast<double>(base) / 3600.0;
    const double base_h = out.base_interval_hours;

    struct DayAccum {
        double kwh = 0.0;
        bool excluded = false;
    };
    std::map<std::int64_t, DayAccum> days; // keyed by day number

    const auto add_sample = [&](std::int64_t when, double power) {
        days[when / 86400].kwh += std::max(0.0, power - thermal_limit) * base_h * to_kw;
    };

    for (std::size_t i = 0; i < recs.size(); ++i) {
        add_sample(recs[i].epoch_seconds, recs[i].power);
        if (i + 1 >= recs.size()) break;
        const std::int64_t gap = recs[i + 1].epoch_seconds - recs[i].epoch_seconds;
        if (gap <= base) continue;
        if (gap <= 2 * 3600) {
            // Fill short gaps by linear interpolation at the base interval.
            const auto steps = static_cast<std::int64_t>(gap / base);
            for (std::int64_t k = 1; k < steps; ++k) {
                const double frac = static_cast<double>(k * base) / static_cast<double>(gap);
                const double p = recs[i].power + frac * (recs[i + 1].power - recs[i].power);
                add_sample(recs[i].epoch_seconds + k * base, p);
                ++out.interpolated_records;
            }
        } else {
            for (std::int64_t day = recs[i].epoch_seconds / 86400;
                 day <= recs[i + 1].epoch_seconds / 86400; ++day) {
                days[day].excluded = true;
            }
        }
    }

    // Make sure every day spanned by the data shows up, so below-limit
    // periods produce explicit zero buckets.
    for (std::int64_t day = recs.front().epoch_seconds / 86400;
         day <= recs.back().epoch_seconds / 86400; ++day) {
        days.try_emplace(day);
    }

    std::map<std::pair<int, int>, EnergyBucket> monthly;
    for (const auto& [day, acc] : days) {
        if (acc.excluded) {
            ++out.excluded_days;
            continue;
        }
        int y = 0, m = 0, d = 0;
        civil_from_days(day, y, m, d);
        if (bucket == Bucketing::daily) {
            EnergyBucket b;
            b.year = y;
            b.month = m;
            b.day = d;
            b.kwh = acc.kwh;
            b.days_included = 1;
            out.buckets.push_back(b);
        } else {
            auto& b = monthly[{y, m}];
            b.year = y;
            b.month = m;
            b.day = 0;
            b.kwh += acc.kwh;
            b.days_included += 1;
        }
    }
    if (bucket == Bucketing::monthly) {
        for (const auto& [key, b] : monthly) {
            out.buckets.push_back(b);
        }
    }
    return out;
}

double bucket_capacity_kw(const EnergyBucket& bucket, double peak_duration_hours_per_day) {
    if (!(peak_duration_hours_per_day > 0.0)) {
        throw std::invalid_argument("bucket_capacity_kw: peak duration must be > 0");
    }
    const int days = bucket.days_included > 0 ? bucket.days_included : 1;
    return bucket.kwh / (peak_duration_hours_per_day * days);
}

CalibrationResult calibrate_gbm(std::span<const double> series, double dt_years) {
    if (series.size() < 3) {
        throw std::invalid_argument("calibrate_gbm: need at least 3 observations");
    }
    if (!(dt_years > 0.0)) {
        throw std::invalid_argument("calibrate_gbm: dt must be > 0");
    }
    for (double v : series) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("calibrate_gbm: series values must be positive");
        }
    }
    const std::size_t n = series.size() - 1;
    std::vector<double> lr(n);
    for (std::size_t i = 0; i < n; ++i) {
        lr[i] = std::log(series[i + 1] / series[i]);
    }
    double mean = 0.0;
    for (double v : lr) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : lr) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    GbmEstimate est;
    est.sigma = sd / std::sqrt(dt_years);
    est.mu = mean / dt_years + 0.5 * est.sigma * est.sigma;
    est.n_obs = n;
    est.stderr_sigma = est.sigma / std::sqrt(2.0 * static_cast<double>(n));
    est.stderr_mu = std::sqrt(est.sigma * est.sigma / (static_cast<double>(n) * dt_years) +
                              0.5 * std::pow(est.sigma, 4) / static_cast<double>(n));

    CalibrationResult out;
    out.estimate = est;
    out.dt_years = dt_years;
    out.last_value = series.back();
    return out;
}

CalibrationResult calibrate_mean_reverting(std::span<const double> series, double dt_years) {
    if (series.size() < 4) {
        throw std::invalid_argument("calibrate_mean_reverting: need at least 4 observations");
    }
    if (!(dt_years > 0.0)) {
        throw std::invalid_argument("calibrate_mean_reverting: dt must be > 0");
    }
    const std::size_t n = series.size() - 1; // AR(1) pairs
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += series[i];
        sy += series[i + 1];
    }
    const double xbar = sx / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (series[i] - xbar) * (series[i] - xbar);
        sxy += (series[i] - xbar) * (series[i + 1] - ybar);
    }

    MeanRevEstimate est;
    est.n_obs = n;

    const double scale = std::abs(xbar) > 0.0 ? xbar * xbar : 1.0;
    if (sxx <= 1e-14 * scale * static_cast<double>(n)) {
        // No variation: the level is known, the speed is not.
        est.beta_unidentifiable = true;
        est.s_bar = ybar;
        est.sigma = 0.0;
        CalibrationResult out;
        out.estimate = est;
        out.dt_years = dt_years;
        out.last_value = series.back();
        return out;
    }

    const double b = sxy / sxx;
    const double a = ybar - b * xbar;
    if (!(b > 0.0 && b < 1.0)) {
        throw ModelFitError("calibrate_mean_reverting: AR(1) slope " + std::to_string(b) +
                            " outside (0,1); the series does not mean-revert");
    }

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = series[i + 1] - (a + b * series[i]);
        ssr += resid * resid;
    }
    const double s2 = ssr / static_cast<double>(n - 2);

    const double beta = -std::log(b) / dt_years;
    const double s_bar = a / (1.0 - b);
    // Residual variance equals sigma^2 (1-b^2)/(2 beta) under the exact
    // discretization.
    const double sigma = std::sqrt(std::max(0.0, s2 * 2.0 * beta / (1.0 - b * b)));

    const double var_b = s2 / sxx;
    const double var_a = s2 * (1.0 / static_cast<double>(n) + xbar * xbar / sxx);
    const double cov_ab = -s2 * xbar / sxx;

    est.beta = beta;
    est.s_bar = s_bar;
    est.sigma = sigma;
    est.stderr_beta = std::sqrt(var_b) / (b * dt_years);
    const double ga = 1.0 / (1.0 - b);
    const double gb = a / ((1.0 - b) * (1.0 - b));
    est.stderr_s_bar = std::sqrt(std::max(0.0, ga * ga * var_a + gb * gb * var_b + 2.0 * ga * gb * cov_ab));
    est.stderr_sigma = sigma / std::sqrt(2.0 * static_cast<double>(n - 2));

    CalibrationResult out;
    out.estimate = est;
    out.dt_years = dt_years;
    out.last_value = series.back();
    return out;
}

} // namespace rov
