#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace oslo {

/// Deterministic, portable random stream.
///
/// The engine is std::mt19937_64 (fully specified by the standard), seeded
/// through SplitMix64 from a (seed, stream) pair: stream n of seed s starts
/// at splitmix64(s XOR (0x9E3779B97F4A7C15 * (n + 1))). All derived draws
/// (bounded integers, uniform doubles, normals, shuffles) are implemented
/// here rather than via std::*_distribution, whose output is
/// implementation-defined. Equal (seed, stream) therefore reproduces the
/// same sequence on any conforming compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Unbiased integer in [0, n), n >= 1, via rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Standard normal via Box-Muller on uniform01 draws.
    double normal();

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// k distinct indices from [0, n), in selection order (partial Fisher-Yates).
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// SplitMix64 mixing function.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace oslo
