#pragma once

#include <cstdint>

namespace rov {

// Inverse of the standard normal CDF (Wichura's PPND16 rational
// approximations, accurate to ~1e-15). Requires p in (0,1).
double normal_inv_cdf(double p);

namespace detail {

// splitmix64 output scrambler, also used to mix seeds.
inline std::uint64_t scramble64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Per-path noise stream: the k-th value depends only on (seed, path, k), so
// paths can be generated in any order, or concurrently, with identical
// output. Normals come from the inverse CDF applied to splitmix64 uniforms,
// which keeps the sequence stable across platforms.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path)
        : state_(detail::scramble64(detail::scramble64(seed + 0x9E3779B97F4A7C15ULL) ^
                                    detail::scramble64(path * 0xD1B54A32D192ED03ULL + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::scramble64(state_);
    }

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double next_u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_inv_cdf(next_u01()); }

private:
    std::uint64_t state_;
};

} // namespace rov
