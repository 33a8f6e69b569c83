#pragma once

#include <cstdint>

namespace sade {

// Mixing function from splitmix64 (Vigna). Used both as the stream key
// derivation and as the per-step output scrambler.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Tags keep the random draws of unrelated concerns in disjoint streams:
// topology placement never shifts protocol decisions, jam schedules are
// identical across protocol choices, and so on.
enum class StreamPurpose : std::uint64_t {
    placement = 1,
    decision = 2,
    adversary = 3,
    backoff = 4,
};

// Counter-based substream: output k is a pure function of (key, k), so a
// stream never perturbs, and is never perturbed by, draws taken elsewhere.
// Statistically this is splitmix64 with a derived starting state.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint32_t node, StreamPurpose purpose) noexcept
        : state_(mix64(mix64(mix64(seed) ^ (0xA24BAED4963EE407ULL + node)) ^
                       (0x9FB21C651E98DF25ULL + static_cast<std::uint64_t>(purpose)))) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0,bound). Multiply-shift; bias is < 2^-53 for the small
    // bounds used here and the draw count is always exactly one.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    bool bernoulli(double p) noexcept { return next_double() < p; }

private:
    std::uint64_t state_;
};

} // namespace sade
