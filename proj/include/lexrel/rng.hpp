#pragma once

#include <cstdint>
#include <vector>

namespace lexrel {

// SplitMix64 stream. Every random choice in the toolkit (bootstrap draws,
// per-split feature subsets, synthetic data) goes through this generator so
// that a (seed, draw sequence) pair reproduces bit-identically everywhere.
// The exact definition, including the bounded draw and the partial
// Fisher-Yates subset draw below, is part of the model reproducibility
// contract and is documented in the README.
class SplitMix64 {
 public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    // Uniform real in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform real in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
    std::uint64_t state_;
};

// k distinct values from {0, ..., n-1} by partial Fisher-Yates: for each
// i < k, swap position i with position i + below(n - i). Output order is the
// draw order; callers needing a canonical order sort afterwards.
inline std::vector<int> sample_without_replacement(SplitMix64& rng, int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

}  // namespace lexrel
