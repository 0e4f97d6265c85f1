#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "classo/errors.hpp"

namespace classo {

namespace detail {

// splitmix64 finalizer. Used to derive substream seeds; one application per
// label component gives well-separated seeds for nearby inputs.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// FNV-1a over the purpose string, so substream labels can carry text.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace detail

// Deterministic random stream. mt19937_64 is fully specified by the language
// standard, and the gaussian/uniform transformations below are written out
// explicitly because the standard library distributions are
// implementation-defined; this keeps byte-identical output across platforms.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    // log argument is in (2^-53, 1], so it never sees zero.
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, bound) without modulo bias (rejection from below).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw SpecError("uniform_below: bound must be positive");
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % bound;
        }
    }

    // +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

    // k distinct indices from {0, ..., n-1}, uniform without replacement,
    // via partial Fisher-Yates. Order of the returned prefix is part of the
    // deterministic contract.
    std::vector<int> sample_without_replacement(int n, int k) {
        if (k < 0 || k > n) throw SpecError("sample_without_replacement: need 0 <= k <= n");
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(uniform_below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(k));
        return idx;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Root of the determinism contract: a master seed plus a structured label
// (purpose string and integer indices) names every substream in a run.
// Identical (master_seed, label) always yields an identical stream; streams
// with different labels are independent for all practical purposes.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t master_seed) : master_seed_(master_seed) {}

    std::uint64_t master_seed() const { return master_seed_; }

    template <typename... Ints>
    std::uint64_t substream_seed(std::string_view purpose, Ints... indices) const {
        std::uint64_t h = detail::mix64(master_seed_ ^ detail::fnv1a(purpose));
        ((h = detail::mix64(h ^ static_cast<std::uint64_t>(indices))), ...);
        return h;
    }

    template <typename... Ints>
    RandomStream stream(std::string_view purpose, Ints... indices) const {
        return RandomStream(substream_seed(purpose, indices...));
    }

private:
    std::uint64_t master_seed_;
};

}  // namespace classo
