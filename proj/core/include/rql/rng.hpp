#pragma once

#include <cmath>
#include <cstdint>

namespace rql {

// SplitMix64 output mixer (Steele, Lea & Flood's SplittableRandom mix;
// Vigna's public-domain splitmix64.c). We use it in counter form: draw i of
// the stream with key k is mix64(k + (i+1)*kGamma), a pure function of
// (k, i). Any prefix of a stream can therefore be regenerated or extended
// later, bit for bit, without replaying state.
inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent stream key for a (seed, tag) pair. A different odd multiplier
// than the draw counter uses, so key chains and draw sequences do not alias.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) noexcept {
    return mix64(seed + (tag + 1) * 0xD1B54A32D192ED03ull);
}

// Counter-based uniform/exponential stream.
struct CounterRng {
    std::uint64_t key = 0;

    std::uint64_t bits(std::uint64_t i) const noexcept {
        return mix64(key + (i + 1) * kGamma);
    }

    // Uniform on the open interval (0,1): top 53 bits, offset by half an ulp
    // so neither endpoint is reachable.
    double uniform(std::uint64_t i) const noexcept {
        return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Inverse-CDF exponential draw; u in (0,1) keeps the result finite.
    double exponential(std::uint64_t i, double rate) const noexcept {
        return -std::log(uniform(i)) / rate;
    }
};

}  // namespace rql
