#pragma once

#include <cstdint>
#include <random>

namespace simbeam {

/// splitmix64 finalizer; derives statistically independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named sub-streams of a drop seed. Adding a stream never perturbs the
/// values drawn from the existing ones.
enum class Stream : std::uint64_t {
    user_positions = 1,
    fading = 2,
    initial_phases = 3,
    initial_precoder = 4,
    test = 99,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream)
{
    return std::mt19937_64(mix_seed(mix_seed(seed) ^ static_cast<std::uint64_t>(stream)));
}

} // namespace simbeam
