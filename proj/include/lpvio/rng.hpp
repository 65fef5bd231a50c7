#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lpvio {

/// Deterministic random source. The uniform mapping and the Box-Muller Gaussian
/// are pinned here (not delegated to std distributions), so a seed fully
/// determines every sampled sequence across builds.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in the open interval (0, 1).
    double uniform01() {
        // 53-bit mantissa, offset by half a step so 0 and 1 are unreachable
        const std::uint64_t bits = gen_() >> 11;
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Standard normal via Box-Muller; generates in pairs, caching the second.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

   private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lpvio
