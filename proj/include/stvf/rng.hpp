#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stvf {

// Gaussian stream with an implementation-independent mapping from engine
// bits to doubles. std::normal_distribution is avoided because its output
// sequence is not pinned by the standard; reproducibility here depends only
// on mt19937_64 and libm.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    // 53-bit uniform in [0,1)
    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller; u clamped away from 0 so log stays finite
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double phi = 2.0 * std::numbers::pi * v;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace stvf
