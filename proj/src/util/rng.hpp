#pragma once

#include <cstdint>
#include <random>

namespace mipred::util {

// Canonical 53-bit uniform in [0, 1). Used everywhere a real draw feeds an
// observable artifact so files reproduce bit-for-bit across standard libraries
// (std::uniform_real_distribution is implementation-defined).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64 step: advances `state` and returns a well-mixed 64-bit value.
// Used to derive independent child seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace mipred::util
