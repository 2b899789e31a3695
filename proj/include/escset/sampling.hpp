#pragma once

#include <cstdint>
#include <vector>

#include "escset/extended_point.hpp"
#include "escset/window.hpp"

namespace escset {

/// splitmix64 stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct SampleSet {
    std::uint64_t seed = 0;
    std::size_t count = 0;
    Window window{};
    std::vector<complex> points;
};

/// Deterministic points in the window: x then y drawn per point from one
/// splitmix64 stream, mapped affinely from [0, 1).
inline SampleSet make_samples(std::uint64_t seed, std::size_t count, const Window& window) {
    window.check();
    SampleSet set{seed, count, window, {}};
    set.points.reserve(count);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(window.x_min, window.x_max);
        const double y = rng.uniform(window.y_min, window.y_max);
        set.points.emplace_back(x, y);
    }
    return set;
}

}  // namespace escset
