#pragma once

#include <cstdint>
#include <random>

namespace abckit {

using RngEngine = std::mt19937_64;

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

// Seed for the `index`-th independent stream of a run. Work item i always sees
// the same stream no matter how items are scheduled across workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return detail::mix64(master + 0x9e3779b97f4a7c15ull * (index + 1));
}

inline RngEngine make_engine(std::uint64_t master, std::uint64_t index) {
    return RngEngine(derive_seed(master, index));
}

}  // namespace abckit
