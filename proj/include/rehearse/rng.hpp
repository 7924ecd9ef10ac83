#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace rehearse {

// SplitMix64 (Steele, Lea, Flood 2014). Every seeded draw in this project goes
// through this generator so results reproduce across compilers and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) by rejection of the short top bucket.
    std::uint64_t below(std::uint64_t bound) noexcept;

    // 53-bit uniform double in [0, 1).
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) noexcept { return unit() < p; }

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer on its own; used to scramble derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// FNV-1a 64-bit over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text) noexcept;

// Seed for a named sub-stream: mix64(seed ^ fnv1a64(label)). Adding a new label
// never changes the stream of an existing one.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Fisher-Yates, drawing from the back.
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace rehearse
