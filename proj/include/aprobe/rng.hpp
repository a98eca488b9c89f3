#pragma once

#include <array>
#include <cstdint>

namespace aprobe {

// Philox4x32-10 counter-based generator (see docs/rng.md for the exact
// convention). Streams are independent for distinct (seed, stream) pairs and
// reproducible across platforms: the output is a pure function of
// (seed, stream, block index).
struct Philox4x32 {
    static std::array<uint32_t, 4> block(const std::array<uint32_t, 4>& counter,
                                         const std::array<uint32_t, 2>& key);
};

class CounterRng {
public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    uint32_t next_u32();
    /// 53-bit uniform double in [0, 1).
    double next_double();

private:
    void refill();

    uint64_t seed_;
    uint64_t stream_;
    uint64_t index_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pos_ = 4;
};

}  // namespace aprobe
