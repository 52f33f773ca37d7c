#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rov/calibrate.hpp"
#include "rov/scenario.hpp"

namespace rov {

// Config document with sections processes/costs/windows/lsmc/run. Missing
// fields keep the benchmark defaults; unknown keys are rejected.
ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& config);

// FNV-1a over the canonical (resolved, key-sorted) config serialization.
std::string config_digest(const ScenarioConfig& config);

// Sweep spec: {"sweeps": [{"param": "mu_d", "values": [0.01, 0.03]}]}.
std::vector<std::pair<std::string, std::vector<double>>> sweeps_from_json_text(
    const std::string& text);

std::string report_to_json_text(const ScenarioReport& report);
std::string comparison_to_json_text(const StandaloneComparison& comparison);
std::string calibration_to_json_text(const CalibrationResult& result,
                                     const std::string& model_name);

// Table-2-shaped CSV: per-year invest frequencies in percent (one decimal),
// then standard NPV / ROV / flexible NPV in k$.
std::string report_csv_header(const DecisionWindows& windows);
std::string report_csv_row(const ScenarioReport& report, const DecisionWindows& windows);

// Fig-5-style series: option value and modal-year frequency per sweep point.
std::string sensitivity_series_csv(const std::vector<SweepPoint>& points,
                                   const DecisionWindows& windows);

std::string stopping_times_csv(const CompoundSolution& solution);

struct RunManifest {
    std::string artifact_version = "0.1.0";
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string created_utc;
    std::vector<std::string> outputs;
};

std::string manifest_to_json_text(const RunManifest& manifest);
std::string utc_timestamp_now();

} // namespace rov
