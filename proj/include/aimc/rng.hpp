#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace aimc {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Sequential SplitMix64 generator, used only to expand a seed into xoshiro state.
class SplitMix64 {
public:
    constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** (Blackman & Vigna). Seeded through SplitMix64 so any 64-bit
/// seed, including zero, yields a valid nonzero state.
///
/// Satisfies UniformRandomBitGenerator, but the helpers below (uniform,
/// uniform_int, normal) are what the generator pipeline uses: they are fully
/// specified here, so streams are bit-reproducible across standard libraries.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in the closed range [lo, hi] (Lemire's nearly-divisionless method).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        if (hi <= lo) return lo;
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::int64_t>((*this)());  // full 64-bit span
        __uint128_t m = static_cast<__uint128_t>((*this)()) * range;
        auto low = static_cast<std::uint64_t>(m);
        if (low < range) {
            const std::uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                m = static_cast<__uint128_t>((*this)()) * range;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return lo + static_cast<std::int64_t>(m >> 64);
    }

    /// Standard normal pair via Box-Muller.
    std::array<double, 2> normal_pair() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

/// Per-pulse seed for grid cell (snr_index, class_index, pulse_index).
///
/// Each field is folded in through the SplitMix64 finalizer, so the seed is a
/// pure function of the four inputs. Distinctness over the default
/// 13 x 33 x 1000 grid is checked exhaustively in the test suite.
constexpr std::uint64_t derive_pulse_seed(std::uint64_t master_seed, std::uint64_t snr_index,
                                          std::uint64_t class_index, std::uint64_t pulse_index) noexcept {
    std::uint64_t h = splitmix64_mix(master_seed);
    h = splitmix64_mix(h ^ snr_index);
    h = splitmix64_mix(h ^ (class_index << 20));
    h = splitmix64_mix(h ^ (pulse_index << 40));
    return h;
}

/// Independent sub-stream of a seed, e.g. noise or code draws for one pulse.
enum class Stream : std::uint64_t {
    params = 0,
    code = 0x636F6465ULL,   // "code"
    noise = 0x6E6F697365ULL, // "noise"
    split = 0x73706C6974ULL, // "split"
};

constexpr std::uint64_t substream_seed(std::uint64_t seed, Stream stream) noexcept {
    if (stream == Stream::params) return seed;
    return splitmix64_mix(seed ^ splitmix64_mix(static_cast<std::uint64_t>(stream)));
}

}  // namespace aimc
