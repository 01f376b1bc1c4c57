#include "adrc/noise.hpp"

#include <cmath>
#include <numbers>

#include "adrc/error.hpp"

namespace adrc {

GaussianNoise::GaussianNoise(std::uint64_t seed, double variance)
    : rng_(seed), variance_(variance), stddev_(std::sqrt(variance)) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) throw InvalidInput("noise variance must be >= 0");
}

double GaussianNoise::next() {
    if (variance_ == 0.0) return 0.0;
    if (has_spare_) {
        has_spare_ = false;
        return stddev_ * spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(rng_.uniform()));
    const double angle = 2.0 * std::numbers::pi * rng_.uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return stddev_ * radius * std::cos(angle);
}

std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t n, double variance) {
    GaussianNoise gen(seed, variance);
    std::vector<double> out(n);
    for (auto& v : out) v = gen.next();
    return out;
}

} // namespace adrc
