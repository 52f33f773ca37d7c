#include "rov/path_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rov/errors.hpp"

namespace rov {

PathMatrix::PathMatrix(std::size_t n_paths, std::size_t n_steps, double dt, double t0_value,
                       std::uint64_t seed)
    : n_paths_(n_paths),
      n_steps_(n_steps),
      stride_(n_steps + 1),
      dt_(dt),
      t0_value_(t0_value),
      seed_(seed) {
    if (n_paths_ == 0) {
        throw std::invalid_argument("PathMatrix: n_paths must be >= 1");
    }
    if (n_steps_ == 0) {
        throw std::invalid_argument("PathMatrix: n_steps must be >= 1");
    }
    if (!(dt_ > 0.0)) {
        throw std::invalid_argument("PathMatrix: dt must be positive");
    }
    values_.assign(n_paths_ * stride_, t0_value_);
}

PathMatrix PathMatrix::from_values(std::vector<double> values, std::size_t n_paths,
                                   std::size_t n_steps, double dt, std::uint64_t seed) {
    PathMatrix m(n_paths, n_steps, dt, values.empty() ? 0.0 : values.front(), seed);
    if (values.size() != n_paths * (n_steps + 1)) {
        throw std::invalid_argument("PathMatrix: value grid does not match n_paths x (n_steps+1)");
    }
    for (std::size_t w = 0; w < n_paths; ++w) {
        if (values[w * (n_steps + 1)] != values[0]) {
            throw std::invalid_argument("PathMatrix: column 0 must equal the initial level on every path");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("PathMatrix: entries must be finite and non-negative");
        }
    }
    m.values_ = std::move(values);
    return m;
}

void PathMatrix::write_csv(std::ostream& os) const {
    os << "path";
    for (std::size_t t = 0; t <= n_steps_; ++t) {
        os << ",t" << t;
    }
    os << "\n";
    char buf[40];
    for (std::size_t w = 0; w < n_paths_; ++w) {
        os << w;
        const double* r = row(w);
        for (std::size_t t = 0; t <= n_steps_; ++t) {
            std::snprintf(buf, sizeof(buf), ",%.17g", r[t]);
            os << buf;
        }
        os << "\n";
    }
}

PathMatrix PathMatrix::read_csv(std::istream& is, double dt, std::uint64_t seed) {
    std::string line;
    if (!std::getline(is, line)) {
        throw IngestError("path CSV: missing header", 1);
    }
    std::size_t n_cols = 0;
    for (char c : line) {
        if (c == ',') ++n_cols;
    }
    if (n_cols < 2) {
        throw IngestError("path CSV: header must be path,t0,...,tN", 1);
    }
    const std::size_t n_steps = n_cols - 1;

    std::vector<double> values;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col > 0) {
                try {
                    values.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    throw IngestError("path CSV: bad numeric cell '" + cell + "'", line_no);
                }
            }
            ++col;
        }
        if (col != n_cols + 1) {
            throw IngestError("path CSV: row has wrong number of columns", line_no);
        }
    }
    if (values.empty()) {
        throw IngestError("path CSV: no data rows", line_no);
    }
    const std::size_t n_paths = values.size() / (n_steps + 1);
    return from_values(std::move(values), n_paths, n_steps, dt, seed);
}

ScenarioSet build_scenario_set(PathMatrix demand, PathMatrix fuel, PathMatrix pv_cost) {
    const auto check = [&](const PathMatrix& m, const char* name) {
        if (m.n_paths() != demand.n_paths() || m.n_steps() != demand.n_steps()) {
            throw std::invalid_argument(std::string("build_scenario_set: dimension mismatch for ") + name);
        }
        if (m.dt() != demand.dt()) {
            throw std::invalid_argument(std::string("build_scenario_set: dt mismatch for ") + name);
        }
    };
    check(fuel, "fuel");
    check(pv_cost, "pv_cost");
    return ScenarioSet{std::move(demand), std::move(fuel), std::move(pv_cost)};
}

} // namespace rov
