#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sketchsel {

// SplitMix64 finalizer: a fixed 64-bit bijective mixer.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t hash_combine64(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

// Counter-based generator: output i is splitmix64(key + (i+1)*GOLDEN), i.e. the
// SplitMix64 sequence seeded with `key`. The key of a substream is derived from
// (seed, tag, indices...), so independently keyed streams can be consumed in any
// order or thread without changing their outputs.
class Rng {
 public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    template <class... Ix>
    static Rng stream(std::uint64_t seed, std::string_view tag, Ix... idx) {
        std::uint64_t h = hash_combine64(fnv1a64(tag), seed);
        ((h = hash_combine64(h, static_cast<std::uint64_t>(idx))), ...);
        return Rng(h);
    }

    std::uint64_t next_u64() {
        return splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Integer in [0, bound), bound > 0, rejection sampled to remove modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ull - ~0ull % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

 private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sketchsel
