#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every draw in the suite is a pure function of (master seed, stream id,
// replicate index, counter). Replicates can therefore be scheduled on any
// number of workers in any order and still see identical randomness.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace coalesce {

using Counter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline Counter philox4x32(Counter ctr, PhiloxKey key) noexcept
{
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed of replicate `replicate` in stream `stream` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t replicate) noexcept
{
    return mix64(mix64(mix64(master) ^ stream) ^ (replicate * 0xD1B54A32D192ED03ull));
}

constexpr PhiloxKey key_of(std::uint64_t seed) noexcept
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Uniform on the open interval (0, 1) from 64 random bits.
inline double to_unit(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) noexcept
{
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Box-Muller on one Philox block; uses the cosine branch only.
inline double normal_from_block(const Counter& block) noexcept
{
    const double u1 = to_unit(join(block[0], block[1]));
    const double u2 = to_unit(join(block[2], block[3]));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Identifies one replicate of one stream.
struct StreamId {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
    std::uint64_t replicate = 0;

    std::uint64_t seed() const noexcept { return derive_seed(master, stream, replicate); }
};

/// Sequential generator over a Philox counter. Satisfies
/// UniformRandomBitGenerator so it can drive <random> adaptors, but the
/// suite uses the member samplers, whose algorithms are fixed here.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) noexcept : key_(key_of(seed)) {}
    explicit CounterRng(const StreamId& id) noexcept : CounterRng(id.seed()) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        if (buffered_ == 0) {
            refill();
        }
        --buffered_;
        return buffer_[buffered_];
    }

    double uniform() noexcept { return to_unit((*this)()); }

    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    // Uniform integer in [0, n); n > 0. Multiply-shift, bias below 2^-32 for
    // the small n used here.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const unsigned __int128 wide = static_cast<unsigned __int128>((*this)()) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    // Poisson count by inversion; large means are split into independent
    // chunks of at most 30.
    std::uint64_t poisson(double mean) noexcept
    {
        std::uint64_t total = 0;
        while (mean > 30.0) {
            total += poisson_inversion(30.0);
            mean -= 30.0;
        }
        return total + poisson_inversion(mean);
    }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t poisson_inversion(double mean) noexcept
    {
        if (mean <= 0.0) {
            return 0;
        }
        double u = uniform();
        double term = std::exp(-mean);
        double cdf = term;
        std::uint64_t k = 0;
        while (u > cdf && k < 10000) {
            ++k;
            term *= mean / static_cast<double>(k);
            cdf += term;
        }
        return k;
    }

    void refill() noexcept
    {
        const Counter ctr{static_cast<std::uint32_t>(counter_),
                          static_cast<std::uint32_t>(counter_ >> 32), 0x5EC0u, 0};
        ++counter_;
        const Counter out = philox4x32(ctr, key_);
        buffer_[1] = join(out[0], out[1]);
        buffer_[0] = join(out[2], out[3]);
        buffered_ = 2;
    }

    PhiloxKey key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Random field addressed by (step, particle) rather than by draw order.
/// Two simulations that share a field and a particle labelling see the same
/// Brownian increments, which is what couples flow trajectories started
/// from different points or resumed from a checkpoint.
class RandomField {
public:
    explicit RandomField(std::uint64_t seed) noexcept : key_(key_of(seed)) {}
    explicit RandomField(const StreamId& id) noexcept : RandomField(id.seed()) {}

    // Standard normal attached to `particle` at time step `step`.
    double normal(std::uint64_t step, std::uint32_t particle) const noexcept
    {
        const Counter ctr{static_cast<std::uint32_t>(step), particle,
                          static_cast<std::uint32_t>(step >> 32), 0u};
        return normal_from_block(philox4x32(ctr, key_));
    }

    // Second independent normal for the same slot (distinct tag word).
    double normal2(std::uint64_t step, std::uint32_t particle) const noexcept
    {
        const Counter ctr{static_cast<std::uint32_t>(step), particle,
                          static_cast<std::uint32_t>(step >> 32), 1u};
        return normal_from_block(philox4x32(ctr, key_));
    }

    // Uniform attached to the ordered pair (left, right) at `step`; `tag`
    // (< 8) separates independent uses within one step. Particle labels
    // must stay below 2^28.
    double uniform(std::uint64_t step, std::uint32_t left, std::uint32_t right,
                   std::uint32_t tag) const noexcept
    {
        const Counter ctr{static_cast<std::uint32_t>(step), left,
                          static_cast<std::uint32_t>(step >> 32),
                          (right << 4) | 8u | (tag & 7u)};
        const Counter out = philox4x32(ctr, key_);
        return to_unit(join(out[0], out[1]));
    }

private:
    PhiloxKey key_;
};

} // namespace coalesce
