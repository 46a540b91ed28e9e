#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace logbm::rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the k-th draw of stream (seed, stream_id) is a pure
/// function of (seed, stream_id, k), so chunked parallel sampling reproduces
/// the serial result exactly.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix64(seed ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL))) {}

    std::uint64_t next() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace logbm::rng
