#pragma once

#include <cmath>
#include <cstdint>

namespace swtle {

namespace detail {
/// splitmix64 output scrambler (Steele/Lea/Flood; Vigna's fixed-increment form).
inline std::uint64_t sm64_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Counter-derived seed for an independent child stream: scrambling twice
/// decorrelates nearby (seed, rep, role) triples.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t rep_index, std::uint64_t role = 0) {
    std::uint64_t z = detail::sm64_mix(seed ^ (0xD1B54A32D192ED03ULL * (role + 1)));
    z = detail::sm64_mix(z + rep_index);
    return detail::sm64_mix(z);
}

/// splitmix64 generator with uniform/normal draws. Output is fully determined
/// by the seed; no global state, so replications can run on any thread.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller; the spare draw is cached so a stream's
    /// output is a pure function of its seed and call count.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace swtle
