#pragma once

#include <stdexcept>
#include <string>

namespace rov {

// Invalid configuration: bad field values, unknown keys, inconsistent sections.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CSV parsing, units, ordering).
struct IngestError : std::invalid_argument {
    IngestError(const std::string& what, long line = -1)
        : std::invalid_argument(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    long line_number;
};

// The data cannot support the requested model, e.g. an AR(1) slope outside
// (0,1) when a mean-reverting fit was demanded.
struct ModelFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite intermediate values or failed factorizations.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rov
