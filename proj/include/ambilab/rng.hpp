#pragma once

#include <cmath>
#include <cstdint>

namespace ambilab {

/// Counter-based splittable PRNG.
///
/// Output i of stream (seed, stream_id) is splitmix64_mix(key + i * GOLDEN),
/// where key folds seed and stream id together. There is no sequential state
/// beyond the counter, so streams can be split freely and any (seed, stream)
/// pair reproduces the same sequence on every platform.
///
/// Stream ids are assigned one per (module, purpose) in `streams` below so
/// that, e.g., panel position draws never overlap Monte Carlo draws for the
/// same user seed.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + kGolden) ^ mix(stream * 0x9FB21C651E98DF25ull + 0x6A09E667F3BCC909ull))) {}

    /// Child stream derived from this one; independent of future draws here.
    CounterRng split(std::uint64_t substream) const {
        return CounterRng(key_, substream ^ 0xA0761D6478BD642Full);
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t next_below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

    double next_uniform(double a, double b) { return a + (b - a) * next_double(); }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Registry of stream ids, one per (module, purpose).
namespace streams {
inline constexpr std::uint64_t kMonteCarlo = 1;      // sweep: Monte Carlo contest draws
inline constexpr std::uint64_t kPanelPositions = 2;  // dgp: party positions
inline constexpr std::uint64_t kPanelEffects = 3;    // dgp: country-year and party effects
inline constexpr std::uint64_t kPanelNoise = 4;      // dgp: idiosyncratic noise
inline constexpr std::uint64_t kExpertNoise = 5;     // dgp: expert-level measurement noise
inline constexpr std::uint64_t kContext = 6;         // dgp: GDP growth and government status
} // namespace streams

} // namespace ambilab
