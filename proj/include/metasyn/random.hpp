#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace metasyn {

using Rng = std::mt19937_64;

// Independent generator streams derived from one user seed.
enum class Stream : std::uint64_t {
    Inputs = 1,
    Targets = 2,
    Mask = 3,
    Initial = 4,
    Transitions = 5,
    DeviceNoise = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

// k distinct indices from [0, n), ascending. Partial Fisher-Yates.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

} // namespace metasyn
