#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>

#include "cfisac/common.hpp"

namespace cfisac {

/**
 * Deterministic counter-split random stream.
 *
 * Every sampling task derives its own stream from (master seed, tag path),
 * so realizations can be generated in any order or on any thread count and
 * still produce identical results. splitmix64 is used both for the stream
 * state and for tag mixing; Gaussians come from Box-Muller on the stream's
 * own uniforms, never from std::normal_distribution (implementation-defined).
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed + 0x9e3779b97f4a7c15ull)) {}

    // Child stream for a tagged subtask, e.g. derive(seed, {kPaths, p, q}).
    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = master;
        for (std::uint64_t t : path) s = mix(s ^ mix(t + 0x9e3779b97f4a7c15ull));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on {lo, ..., hi} inclusive, rejection sampled (no modulo bias).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw DomainError("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Circularly symmetric complex Gaussian CN(0, var).
    cxd cnormal(double var) {
        double u1;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1) * var);  // radius for var/2 per component
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27; x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }
    std::uint64_t state_;
};

// Stable tags for stream derivation paths.
namespace stream {
inline constexpr std::uint64_t kScenario = 1;
inline constexpr std::uint64_t kShadowComm = 2;
inline constexpr std::uint64_t kShadowApAp = 3;
inline constexpr std::uint64_t kPaths = 4;
inline constexpr std::uint64_t kPathAngle = 5;
inline constexpr std::uint64_t kGains = 6;
inline constexpr std::uint64_t kRcs = 7;
inline constexpr std::uint64_t kTargetFree = 8;
inline constexpr std::uint64_t kTargetPos = 9;
inline constexpr std::uint64_t kRealization = 10;
inline constexpr std::uint64_t kExperiment = 11;
}  // namespace stream

}  // namespace cfisac
