#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace robustnet {

// Stateless SplitMix64 finalizer, used to derive independent stream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt_a,
                                           std::uint64_t salt_b) {
    return derive_seed(derive_seed(seed, salt_a), salt_b);
}

// Seeded random stream. The distributions are hand-rolled on top of
// mt19937_64 so the drawn sequence is fixed by the seed alone and does not
// change with the standard library's implementation of <random>.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe as a log argument
    double uniform_pos() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal via Box-Muller
    double gaussian() {
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    // unbiased integer in [0, n), n >= 1, by rejection
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        std::uint64_t x = engine_();
        while (x < threshold) x = engine_();
        return x % n;
    }

    // k distinct indices from [0, d), uniform over k-subsets
    // (partial Fisher-Yates over the index array)
    std::vector<std::uint32_t> sample_indices(std::uint32_t d, std::uint32_t k) {
        std::vector<std::uint32_t> idx(d);
        for (std::uint32_t i = 0; i < d; ++i) idx[i] = i;
        for (std::uint32_t i = 0; i < k; ++i) {
            const std::uint32_t j =
                i + static_cast<std::uint32_t>(below(static_cast<std::uint64_t>(d - i)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

}  // namespace robustnet
