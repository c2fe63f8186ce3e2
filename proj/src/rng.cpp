#include "fraudward/rng.hpp"

#include <cmath>
#include <numbers>

namespace fraudward {

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t derive_stream(uint64_t seed, uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x6a09e667f3bcc909ULL));
}

uint64_t Rng::uniform_below(uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    do {
        u = uniform01();
    } while (u <= 0x1.0p-60);
    const double v = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

}  // namespace fraudward
