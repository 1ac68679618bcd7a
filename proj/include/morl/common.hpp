#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace morl {

// Thrown on malformed input files (CSV schema violations, bad checkpoints).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a computation encounters non-finite values or leaves its domain.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a stream index.
// splitmix64 finalizer; avoids correlated streams when one run owns many RNGs.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace morl
