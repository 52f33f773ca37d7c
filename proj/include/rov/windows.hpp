#pragma once

#include <stdexcept>

namespace rov {

// Inclusive range of decision steps. With the annual grid used throughout,
// a step index is simply the year number (column 0 of a PathMatrix is "now").
struct YearRange {
    int first = 0;
    int last = -1;

    int size() const { return last - first + 1; }
    bool contains(int year) const { return year >= first && year <= last; }

    void validate(const char* what) const {
        if (first < 1 || last < first) {
            throw std::invalid_argument(std::string(what) + ": window must be a non-empty range of years >= 1");
        }
    }

    bool operator==(const YearRange&) const = default;
};

// The two decision periods: invest (deferral option) then expand.
struct DecisionWindows {
    YearRange invest{1, 5};
    YearRange expand{6, 10};
    double dt = 1.0;

    void validate() const {
        invest.validate("invest window");
        expand.validate("expand window");
        if (expand.first <= invest.last) {
            throw std::invalid_argument("decision windows must be disjoint with expand after invest");
        }
        if (!(dt > 0.0)) {
            throw std::invalid_argument("decision window dt must be positive");
        }
    }

    bool operator==(const DecisionWindows&) const = default;
};

} // namespace rov
