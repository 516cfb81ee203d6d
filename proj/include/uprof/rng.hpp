#pragma once
// Portable deterministic randomness. mt19937_64's raw output stream is
// pinned by the standard; the std distributions are not, so draws are
// hand-rolled here. Seeds are derived by hashing rather than passed down
// call chains, which keeps results independent of execution order.

#include <cstdint>
#include <random>
#include <string_view>

namespace uprof {

inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t v) {
    return splitmix64(seed ^ splitmix64(v));
}

inline uint64_t mix_seed(uint64_t seed, std::string_view s) {
    return splitmix64(seed ^ fnv1a64(s));
}

template <typename... Parts>
uint64_t derive_seed(uint64_t seed, Parts&&... parts) {
    ((seed = mix_seed(seed, parts)), ...);
    return seed;
}

// Uniform draws on top of the pinned mt19937_64 stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // [0, n) via 128-bit multiply-high; near-uniform and platform-stable.
    size_t next_index(size_t n) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    // Standard normal via Box-Muller on portable uniforms.
    double next_gauss() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace uprof
