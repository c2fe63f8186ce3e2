#pragma once

#include <cstdint>
#include <random>

namespace fraudward {

// splitmix64 finalizer; stateless mixing of a 64-bit value.
uint64_t mix64(uint64_t x);

// Independent stream key for (seed, stream). Streams derived this way are
// stable regardless of the order they are consumed in, which is what keeps
// tree/cell training independent of scheduling.
uint64_t derive_stream(uint64_t seed, uint64_t stream);

// mt19937_64 with hand-rolled transforms. The standard's distribution
// objects are implementation-defined, so every draw we depend on for
// reproducibility goes through these instead.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(mix64(seed)) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // [0, bound), unbiased via rejection
    uint64_t uniform_below(uint64_t bound);

    // standard normal, Box-Muller (pairs cached)
    double normal();

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fraudward
