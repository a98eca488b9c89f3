#include "aprobe/rng.hpp"

namespace aprobe {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t prod = uint64_t(a) * uint64_t(b);
    hi = uint32_t(prod >> 32);
    lo = uint32_t(prod);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32::block(const std::array<uint32_t, 4>& counter,
                                          const std::array<uint32_t, 2>& key) {
    uint32_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
    uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, x0, hi0, lo0);
        mulhilo(kMul1, x2, hi1, lo1);
        const uint32_t y0 = hi1 ^ x1 ^ k0;
        const uint32_t y1 = lo1;
        const uint32_t y2 = hi0 ^ x3 ^ k1;
        const uint32_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {x0, x1, x2, x3};
}

void CounterRng::refill() {
    const std::array<uint32_t, 4> counter{uint32_t(index_), uint32_t(index_ >> 32),
                                          uint32_t(stream_), uint32_t(stream_ >> 32)};
    const std::array<uint32_t, 2> key{uint32_t(seed_), uint32_t(seed_ >> 32)};
    buf_ = Philox4x32::block(counter, key);
    ++index_;
    pos_ = 0;
}

uint32_t CounterRng::next_u32() {
    if (pos_ >= 4) refill();
    return buf_[pos_++];
}

double CounterRng::next_double() {
    const uint32_t a = next_u32();
    const uint32_t b = next_u32();
    const uint64_t mantissa = (uint64_t(a >> 5) << 26) | uint64_t(b >> 6);
    return double(mantissa) * 0x1.0p-53;
}

}  // namespace aprobe
