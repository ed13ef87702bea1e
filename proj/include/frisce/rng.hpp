#pragma once

#include "frisce/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace frisce {

// Deterministic random stream. Gaussian and uniform draws are generated from
// raw mt19937_64 words (not std::*_distribution, whose output is
// implementation-defined), so a given seed yields the same sequence on every
// platform. Streams for parallel work items are derived with derive(), which
// mixes the indices through the splitmix64 finalizer.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b = 0, std::uint64_t c = 0) {
        return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
    }

    static RandomStream derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
        return RandomStream(derive_seed(seed, a, b, c));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double th = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    // Circularly symmetric complex normal with unit total variance, CN(0,1).
    Complex complex_gaussian() {
        const double s = std::numbers::sqrt2 / 2.0;
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

    // Integer uniform on [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // k distinct indices drawn uniformly from [0, n), partial Fisher-Yates.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace frisce
