#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace adrc {

// splitmix64 bit generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1], 53-bit resolution.
    double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Zero-mean Gaussian samples of a given variance (Box-Muller, both outputs used).
class GaussianNoise {
public:
    GaussianNoise(std::uint64_t seed, double variance);

    double next();
    double variance() const noexcept { return variance_; }

private:
    SplitMix64 rng_;
    double variance_;
    double stddev_;
    double spare_{0.0};
    bool has_spare_{false};
};

std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t n, double variance);

} // namespace adrc
