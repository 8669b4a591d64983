#pragma once

#include <cmath>
#include <cstdint>

// Deterministic generators used anywhere results must reproduce bit-for-bit
// across platforms; the standard <random> distributions are
// implementation-defined and unsuitable for that.

namespace objedit::rng {

struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // In [0, 1).
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    // In [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Inclusive on both ends.
    int uniform_int(int lo, int hi) {
        return lo + int(below(std::uint64_t(hi) - std::uint64_t(lo) + 1));
    }

    bool coin() { return (next() & 1) != 0; }
};

constexpr std::uint64_t mix(std::uint64_t seed) { return SplitMix64(seed).next(); }

// Box-Muller over SplitMix64; standard normal draws.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = rng_.uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double u2 = rng_.uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace objedit::rng
