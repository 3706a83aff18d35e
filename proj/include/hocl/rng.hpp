#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hocl {

// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand seeds.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Deterministic random stream: xoshiro256** (Blackman & Vigna 2018) seeded
/// through SplitMix64.
///
/// Every draw is defined by integer arithmetic, so the raw stream is identical
/// on all platforms. Derived doubles:
///   - uniform():  (next() >> 11) * 2^-53, in [0, 1)
///   - normal():   Box-Muller on u1 = 1 - uniform() in (0, 1], u2 = uniform();
///                 returns sqrt(-2 ln u1) cos(2 pi u2) first, then the cached
///                 sqrt(-2 ln u1) sin(2 pi u2).
/// split(k) derives an independent child stream from the original seed and k,
/// so parallel jobs get the same numbers no matter which thread runs them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {
        SplitMix64 sm(seed);
        for (auto& s : state_) s = sm.next();
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

    Rng split(std::uint64_t stream) const noexcept {
        SplitMix64 sm(seed_ ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        return Rng(sm.next());
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t state_[4]{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline Rng seeded_rng(std::uint64_t seed) noexcept { return Rng(seed); }

}  // namespace hocl
