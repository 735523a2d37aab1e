#ifndef RELSAMP_RNG_HPP
#define RELSAMP_RNG_HPP

#include <array>
#include <cstdint>

namespace relsamp {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both for seeding
// and for deriving per-trial seeds.
std::uint64_t splitmix64_mix(std::uint64_t z);

// Per-trial seed: base_seed XOR splitmix64 output for state `index`,
// i.e. base ^ mix(index * 0x9E3779B97F4A7C15 + 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

// Seed used for the single permitted rerun of a statistical check.
std::uint64_t rerun_seed(std::uint64_t base_seed);

/// xoshiro256** 1.0 (Blackman, Vigna), state filled from a SplitMix64
/// stream started at the seed. This is the only generator in the library;
/// every draw is bit-reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via Box-Muller, one variate per call.
    double normal();

private:
    std::array<std::uint64_t, 4> s_;
};

} // namespace relsamp

#endif
