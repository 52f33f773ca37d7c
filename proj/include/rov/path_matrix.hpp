#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rov {

// Simulated paths of one state variable. Storage is row-major with
// n_paths rows and n_steps+1 columns; column 0 holds the initial level on
// every path. Entries are non-negative by construction and strictly positive
// for anything the simulators produce.
class PathMatrix {
public:
    PathMatrix(std::size_t n_paths, std::size_t n_steps, double dt, double t0_value,
               std::uint64_t seed);

    // Wrap an existing grid; validates the shape, non-negativity, and that
    // column 0 is uniform.
    static PathMatrix from_values(std::vector<double> values, std::size_t n_paths,
                                  std::size_t n_steps, double dt, std::uint64_t seed);

    double operator()(std::size_t path, std::size_t step) const {
        return values_[path * stride_ + step];
    }
    double& operator()(std::size_t path, std::size_t step) {
        return values_[path * stride_ + step];
    }

    double* row(std::size_t path) { return values_.data() + path * stride_; }
    const double* row(std::size_t path) const { return values_.data() + path * stride_; }

    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_steps() const { return n_steps_; }
    double dt() const { return dt_; }
    double t0_value() const { return t0_value_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& values() const { return values_; }

    // Number of entries the simulator had to clamp at the positivity floor
    // (only the mean-reverting process can clamp).
    std::size_t clamp_count() const { return clamp_count_; }
    void set_clamp_count(std::size_t count) { clamp_count_ = count; }

    // CSV layout: header "path,t0,...,tN", one row per path, 17 significant
    // digits so a re-read grid is bit-identical.
    void write_csv(std::ostream& os) const;
    static PathMatrix read_csv(std::istream& is, double dt, std::uint64_t seed);

private:
    PathMatrix() = default;

    std::size_t n_paths_ = 0;
    std::size_t n_steps_ = 0;
    std::size_t stride_ = 0;
    double dt_ = 1.0;
    double t0_value_ = 0.0;
    std::uint64_t seed_ = 0;
    std::size_t clamp_count_ = 0;
    std::vector<double> values_;
};

// The three state-variable grids sharing path indices: demand is the
// over-limit peak demand (kW), fuel the diesel price ($/L), pv_cost the
// installed PV-battery unit cost ($/kW).
struct ScenarioSet {
    PathMatrix demand;
    PathMatrix fuel;
    PathMatrix pv_cost;

    std::size_t n_paths() const { return demand.n_paths(); }
    std::size_t n_steps() const { return demand.n_steps(); }
    double dt() const { return demand.dt(); }
};

// Bundles the three grids after checking that dimensions and dt agree.
ScenarioSet build_scenario_set(PathMatrix demand, PathMatrix fuel, PathMatrix pv_cost);

} // namespace rov
