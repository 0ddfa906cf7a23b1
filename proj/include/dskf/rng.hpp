#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dskf {

/// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
/// <random> engines so that seeded runs reproduce bit-for-bit across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % n;
    }

    /// Uniform draw in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        return lo + static_cast<long long>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
    std::vector<int> sample_distinct(int n, int k) {
        if (k > n) throw std::invalid_argument("sample_distinct: k > n");
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<int> out;
        out.reserve(k);
        for (int i = 0; i < k; ++i) {
            std::uint64_t j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    std::uint64_t state_;
};

/// Per-run seed derivation: decorrelates streams for (master seed, run index)
/// pairs. This is the single mixing function used by generation and the
/// experiment runner, so individual runs can be reproduced in isolation.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    Rng g(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    return g.next();
}

}  // namespace dskf
