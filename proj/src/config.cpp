#include "rov/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>

#include "rov/errors.hpp"

namespace rov {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
        (void)value;
    }
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return obj[key].get<double>();
}

json frequency_to_json(const FrequencyDistribution& dist) {
    json years = json::object();
    for (std::size_t i = 0; i < dist.years.size(); ++i) {
        years[std::to_string(dist.years[i])] = dist.fractions[i];
    }
    json out;
    out["years"] = years;
    out["never"] = dist.never_fraction;
    if (dist.modal_year) {
        out["modal_year"] = *dist.modal_year;
    } else {
        out["modal_year"] = "none";
    }
    return out;
}

json report_to_json(const ScenarioReport& r) {
    json out;
    out["scenario"] = r.scenario_id;
    out["description"] = r.description;
    out["n_paths"] = r.n_paths;
    out["seed"] = r.seed;
    out["standard_npv"] = r.standard_npv;
    out["option_value"] = r.option_value;
    out["flexible_npv"] = r.flexible_npv;
    out["expansion_option_value"] = r.expansion_option_value;
    out["installed_capacity_kw"] = r.installed_capacity_kw;
    out["battery_energy_kwh"] = r.battery_energy_kwh;
    out["recommendation"] = r.recommendation;
    out["invest_frequency"] = frequency_to_json(r.invest_frequency);
    out["expand_frequency"] = frequency_to_json(r.expand_frequency);
    return out;
}

} // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    reject_unknown_keys(doc, {"processes", "costs", "windows", "lsmc", "run"}, "config");

    ScenarioConfig cfg;

    if (doc.contains("processes")) {
        const json& p = doc["processes"];
        reject_unknown_keys(p, {"demand", "fuel", "pv_cost", "correlation"}, "processes");
        if (p.contains("demand")) {
            const json& d = p["demand"];
            reject_unknown_keys(d, {"model", "s0", "mu", "sigma"}, "processes.demand");
            if (d.contains("model") && d["model"] != "gbm") {
                throw ConfigError("processes.demand.model must be 'gbm'");
            }
            cfg.demand.mu = get_num(d, "mu", cfg.demand.mu);
            cfg.demand.sigma = get_num(d, "sigma", cfg.demand.sigma);
            cfg.demand_s0 = get_num(d, "s0", cfg.demand_s0);
        }
        if (p.contains("fuel")) {
            const json& f = p["fuel"];
            reject_unknown_keys(f, {"model", "s0", "beta", "s_bar", "sigma"}, "processes.fuel");
            if (f.contains("model") && f["model"] != "mean_reverting") {
                throw ConfigError("processes.fuel.model must be 'mean_reverting'");
            }
            cfg.fuel.beta = get_num(f, "beta", cfg.fuel.beta);
            cfg.fuel.s_bar = get_num(f, "s_bar", cfg.fuel.s_bar);
            cfg.fuel.sigma = get_num(f, "sigma", cfg.fuel.sigma);
            cfg.fuel_s0 = get_num(f, "s0", cfg.fuel_s0);
        }
        if (p.contains("pv_cost")) {
            const json& v = p["pv_cost"];
            reject_unknown_keys(v, {"model", "s0", "r", "sigma"}, "processes.pv_cost");
            if (v.contains("model") && v["model"] != "risk_neutral_gbm") {
                throw ConfigError("processes.pv_cost.model must be 'risk_neutral_gbm'");
            }
            cfg.pv.r = get_num(v, "r", cfg.pv.r);
            cfg.pv.sigma = get_num(v, "sigma", cfg.pv.sigma);
            cfg.pv_s0 = get_num(v, "s0", cfg.pv_s0);
        }
        if (p.contains("correlation")) {
            const json& c = p["correlation"];
            if (!c.is_array() || c.size() != 3) {
                throw ConfigError("processes.correlation must be a 3x3 matrix");
            }
            for (int i = 0; i < 3; ++i) {
                if (!c[i].is_array() || c[i].size() != 3) {
                    throw ConfigError("processes.correlation must be a 3x3 matrix");
                }
                for (int j = 0; j < 3; ++j) {
                    cfg.correlation.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        c[i][j].get<double>();
                }
            }
        }
    }

    if (doc.contains("costs")) {
        const json& c = doc["costs"];
        reject_unknown_keys(c, {"c_dg", "c_om", "r", "dnsp_share", "battery_ratio", "fuel_burn",
                                "peak_hours"},
                            "costs");
        cfg.costs.c_dg = get_num(c, "c_dg", cfg.costs.c_dg);
        cfg.costs.c_om = get_num(c, "c_om", cfg.costs.c_om);
        cfg.costs.r = get_num(c, "r", cfg.costs.r);
        cfg.costs.dnsp_share = get_num(c, "dnsp_share", cfg.costs.dnsp_share);
        cfg.costs.battery_ratio = get_num(c, "battery_ratio", cfg.costs.battery_ratio);
        cfg.costs.fuel_burn = get_num(c, "fuel_burn", cfg.costs.fuel_burn);
        cfg.costs.peak_hours = get_num(c, "peak_hours", cfg.costs.peak_hours);
    }

    if (doc.contains("windows")) {
        const json& w = doc["windows"];
        reject_unknown_keys(w, {"invest", "expand", "dt"}, "windows");
        const auto read_range = [&](const char* key, YearRange& range) {
            if (!w.contains(key)) return;
            const json& r = w[key];
            if (!r.is_array() || r.size() != 2) {
                throw ConfigError(std::string("windows.") + key + " must be [first, last]");
            }
            range.first = r[0].get<int>();
            range.last = r[1].get<int>();
        };
        read_range("invest", cfg.windows.invest);
        read_range("expand", cfg.windows.expand);
        cfg.windows.dt = get_num(w, "dt", cfg.windows.dt);
    }

    if (doc.contains("lsmc")) {
        const json& l = doc["lsmc"];
        reject_unknown_keys(l, {"max_degree", "cross_terms", "intercept", "expansion_value_mode"},
                            "lsmc");
        if (l.contains("max_degree")) cfg.basis.max_degree = l["max_degree"].get<int>();
        if (l.contains("cross_terms")) cfg.basis.include_cross_terms = l["cross_terms"].get<bool>();
        if (l.contains("intercept")) cfg.basis.include_intercept = l["intercept"].get<bool>();
        if (l.contains("expansion_value_mode")) {
            const std::string mode = l["expansion_value_mode"].get<std::string>();
            if (mode == "pathwise") {
                cfg.expansion_value_mode = ExpansionValueMode::pathwise;
            } else if (mode == "regressed") {
                cfg.expansion_value_mode = ExpansionValueMode::regressed;
            } else {
                throw ConfigError("lsmc.expansion_value_mode must be 'pathwise' or 'regressed'");
            }
        }
    }

    if (doc.contains("run")) {
        const json& r = doc["run"];
        reject_unknown_keys(r, {"n_paths", "seed", "horizon"}, "run");
        if (r.contains("n_paths")) {
            const auto v = r["n_paths"].get<long long>();
            if (v < 0) throw ConfigError("run.n_paths must be >= 0");
            cfg.n_paths = static_cast<std::size_t>(v);
        }
        if (r.contains("seed")) cfg.seed = r["seed"].get<std::uint64_t>();
        if (r.contains("horizon")) cfg.horizon = r["horizon"].get<int>();
    }

    return cfg;
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
    json doc;
    doc["processes"]["demand"] = {{"model", "gbm"},
                                  {"s0", cfg.demand_s0},
                                  {"mu", cfg.demand.mu},
                                  {"sigma", cfg.demand.sigma}};
    doc["processes"]["fuel"] = {{"model", "mean_reverting"},
                                {"s0", cfg.fuel_s0},
                                {"beta", cfg.fuel.beta},
                                {"s_bar", cfg.fuel.s_bar},
                                {"sigma", cfg.fuel.sigma}};
    doc["processes"]["pv_cost"] = {{"model", "risk_neutral_gbm"},
                                   {"s0", cfg.pv_s0},
                                   {"r", cfg.pv.r},
                                   {"sigma", cfg.pv.sigma}};
    doc["processes"]["correlation"] = {
        {cfg.correlation.m[0][0], cfg.correlation.m[0][1], cfg.correlation.m[0][2]},
        {cfg.correlation.m[1][0], cfg.correlation.m[1][1], cfg.correlation.m[1][2]},
        {cfg.correlation.m[2][0], cfg.correlation.m[2][1], cfg.correlation.m[2][2]}};
    doc["costs"] = {{"c_dg", cfg.costs.c_dg},
                    {"c_om", cfg.costs.c_om},
                    {"r", cfg.costs.r},
                    {"dnsp_share", cfg.costs.dnsp_share},
                    {"battery_ratio", cfg.costs.battery_ratio},
                    {"fuel_burn", cfg.costs.fuel_burn},
                    {"peak_hours", cfg.costs.peak_hours}};
    doc["windows"] = {{"invest", {cfg.windows.invest.first, cfg.windows.invest.last}},
                      {"expand", {cfg.windows.expand.first, cfg.windows.expand.last}},
                      {"dt", cfg.windows.dt}};
    doc["lsmc"] = {
        {"max_degree", cfg.basis.max_degree},
        {"cross_terms", cfg.basis.include_cross_terms},
        {"intercept", cfg.basis.include_intercept},
        {"expansion_value_mode",
         cfg.expansion_value_mode == ExpansionValueMode::pathwise ? "pathwise" : "regressed"}};
    doc["run"] = {{"n_paths", cfg.n_paths}, {"seed", cfg.seed}, {"horizon", cfg.horizon}};
    return doc.dump(2) + "\n";
}

std::string config_digest(const ScenarioConfig& config) {
    ScenarioConfig resolved = config;
    for (const auto& [name, value] : config.overrides) {
        resolved.apply_override(name, value);
    }
    resolved.overrides.clear();
    const std::string canon = config_to_json_text(resolved);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::pair<std::string, std::vector<double>>> sweeps_from_json_text(
    const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sweeps") || !doc["sweeps"].is_array()) {
        throw ConfigError("sweep spec must be {\"sweeps\": [{\"param\":..., \"values\":[...]}]}");
    }
    std::vector<std::pair<std::string, std::vector<double>>> out;
    for (const json& entry : doc["sweeps"]) {
        reject_unknown_keys(entry, {"param", "values"}, "sweeps entry");
        if (!entry.contains("param") || !entry.contains("values")) {
            throw ConfigError("each sweep needs 'param' and 'values'");
        }
        std::vector<double> values;
        for (const json& v : entry["values"]) {
            values.push_back(v.get<double>());
        }
        out.emplace_back(entry["param"].get<std::string>(), std::move(values));
    }
    return out;
}

std::string report_to_json_text(const ScenarioReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

std::string comparison_to_json_text(const StandaloneComparison& c) {
    json out;
    out["compound"] = report_to_json(c.compound_report);
    out["standalone_deferral_value"] = c.standalone_value;
    out["standalone_frequency"] = frequency_to_json(c.standalone_frequency);
    out["compound_minus_standalone"] = c.compound_report.option_value - c.standalone_value;
    return out.dump(2) + "\n";
}

std::string calibration_to_json_text(const CalibrationResult& result,
                                     const std::string& model_name) {
    json out;
    out["model"] = model_name;
    out["dt_years"] = result.dt_years;
    out["last_value"] = result.last_value;
    if (const auto* g = std::get_if<GbmEstimate>(&result.estimate)) {
        out["mu"] = g->mu;
        out["sigma"] = g->sigma;
        out["stderr_mu"] = g->stderr_mu;
        out["stderr_sigma"] = g->stderr_sigma;
        out["n_obs"] = g->n_obs;
    } else {
        const auto& m = std::get<MeanRevEstimate>(result.estimate);
        if (m.beta) {
            out["beta"] = *m.beta;
            out["stderr_beta"] = m.stderr_beta;
        } else {
            out["beta"] = nullptr;
            out["stderr_beta"] = nullptr;
        }
        out["beta_unidentifiable"] = m.beta_unidentifiable;
        out["s_bar"] = m.s_bar;
        out["sigma"] = m.sigma;
        out["stderr_s_bar"] = m.stderr_s_bar;
        out["stderr_sigma"] = m.stderr_sigma;
        out["n_obs"] = m.n_obs;
    }
    return out.dump(2) + "\n";
}

std::string report_csv_header(const DecisionWindows& windows) {
    std::string head = "scenario,description";
    for (int y = windows.invest.first; y <= windows.invest.last; ++y) {
        head += ",year" + std::to_string(y) + "_pct";
    }
    head += ",standard_npv_k,rov_k,flexible_npv_k\n";
    return head;
}

std::string report_csv_row(const ScenarioReport& report, const DecisionWindows& windows) {
    std::string row = report.scenario_id + ",\"" + report.description + "\"";
    char buf[48];
    for (int y = windows.invest.first; y <= windows.invest.last; ++y) {
        std::snprintf(buf, sizeof(buf), ",%.1f", 100.0 * report.invest_frequency.fraction_at(y));
        row += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.1f,%.1f,%.1f\n", report.standard_npv / 1000.0,
                  report.option_value / 1000.0, report.flexible_npv / 1000.0);
    row += buf;
    return row;
}

std::string sensitivity_series_csv(const std::vector<SweepPoint>& points,
                                   const DecisionWindows& windows) {
    std::string out =
        "scenario,param,value,modal_year,modal_year_pct,final_year_pct,option_value,"
        "expansion_option_value,standard_npv,flexible_npv\n";
    char buf[256];
    for (const auto& pt : points) {
        const auto& rep = pt.report;
        const std::string modal =
            rep.invest_frequency.modal_year ? std::to_string(*rep.invest_frequency.modal_year)
                                            : "none";
        const double modal_pct = rep.invest_frequency.modal_year
                                     ? 100.0 * rep.invest_frequency.fraction_at(
                                                   *rep.invest_frequency.modal_year)
                                     : 0.0;
        const double final_pct =
            100.0 * rep.invest_frequency.fraction_at(windows.invest.last);
        std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%s,%.1f,%.1f,%.17g,%.17g,%.17g,%.17g\n",
                      pt.scenario_id.c_str(), pt.param.empty() ? "base" : pt.param.c_str(),
                      pt.value, modal.c_str(), modal_pct, final_pct, rep.option_value,
                      rep.expansion_option_value, rep.standard_npv, rep.flexible_npv);
        out += buf;
    }
    return out;
}

std::string stopping_times_csv(const CompoundSolution& solution) {
    std::string out = "path,tau_invest,tau_expand\n";
    const std::size_t n = solution.deferral.n_paths;
    for (std::size_t w = 0; w < n; ++w) {
        out += std::to_string(w);
        const int ti = solution.deferral.stopping_time[w];
        const int te = solution.expansion.stopping_time[w];
        out += ti >= 0 ? "," + std::to_string(ti) : ",never";
        out += te >= 0 ? "," + std::to_string(te) : ",never";
        out += "\n";
    }
    return out;
}

std::string manifest_to_json_text(const RunManifest& manifest) {
    json out;
    out["artifact_version"] = manifest.artifact_version;
    out["command"] = manifest.command;
    out["config_digest"] = manifest.config_digest;
    out["seed"] = manifest.seed;
    out["created_utc"] = manifest.created_utc;
    out["outputs"] = manifest.outputs;
    return out.dump(2) + "\n";
}

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace rov
