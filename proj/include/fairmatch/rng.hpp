#pragma once

// Deterministic randomness for generators, seeded tie-breaks, and fuzzing.
// std::shuffle and the distribution classes are implementation-defined, so
// every random choice in the library goes through this splitmix64 generator
// and the explicit Fisher-Yates below. Identical seeds give identical output
// on every platform.

#include <cstdint>
#include <vector>

namespace fairmatch {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform draw from [0, bound) by rejection, bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % bound;
    }

    // True with probability numerator / 1000.
    bool chance_per_mille(std::uint64_t numerator) { return next_below(1000) < numerator; }

private:
    std::uint64_t state_;
};

template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

inline std::vector<int> shuffled_iota(int count, SplitMix64& rng) {
    std::vector<int> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = i;
    fisher_yates(v, rng);
    return v;
}

}  // namespace fairmatch
