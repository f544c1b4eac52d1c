#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lpjd {

/// SplitMix64 step; used to derive independent sub-seeds from a master seed.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed derivation: mixes the master seed with a stream tag and
/// a counter so that per-trial streams are independent of scheduling order.
inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t counter = 0) {
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s = a ^ (tag * 0xd1342543de82ef95ULL);
    uint64_t b = splitmix64(s);
    s = b ^ (counter * 0x2545f4914f6cdd1dULL);
    return splitmix64(s);
}

/// Standard-normal sampler with an explicit Box-Muller transform so that the
/// generated stream depends only on the seed, not on the standard library's
/// normal_distribution implementation.
class GaussianSampler {
  public:
    explicit GaussianSampler(uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // uniform in (0,1]: avoids log(0)
        double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lpjd
