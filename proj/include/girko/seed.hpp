#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace girko {

// Identifies one reproducible random stream. The stream is a pure function
// of (master_seed, trial_index), independent of scheduling.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// First word of the per-trial mix; recorded in result files as "seed".
inline std::uint64_t derived_seed(SeedSpec seed) {
    std::uint64_t s = seed.master_seed ^ (seed.trial_index * 0xda942042e4dd58b5ULL);
    return detail::splitmix64(s);
}

// mt19937_64 seeded from a 256-bit splitmix chain over (master_seed, trial_index).
inline std::mt19937_64 make_stream(SeedSpec seed) {
    std::uint64_t s = seed.master_seed ^ (seed.trial_index * 0xda942042e4dd58b5ULL);
    const std::uint64_t a = detail::splitmix64(s);
    const std::uint64_t b = detail::splitmix64(s);
    const std::uint64_t c = detail::splitmix64(s);
    const std::uint64_t d = detail::splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    return std::mt19937_64(seq);
}

// Uniform draw in (0, 1], 53-bit resolution. Explicit mapping so streams do
// not depend on the standard library's distribution implementations.
inline double uniform01(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

// Standard real Gaussian via Box-Muller (stateless, two uniforms per draw).
inline double gaussian(std::mt19937_64& gen) {
    const double u = uniform01(gen);
    const double v = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
}

} // namespace girko
