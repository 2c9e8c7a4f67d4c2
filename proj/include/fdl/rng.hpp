// Counter-based RNG (Philox4x32-10).  Streams are keyed by (seed, stream id),
// so per-particle randomness is reproducible no matter how work is divided
// across threads.
#pragma once

#include <array>
#include <cstdint>

namespace fdl {

struct PhiloxBlock {
    std::array<uint32_t, 4> w;
};

// One keyed Philox generator: block(i) is a pure function of (key, i).
class Philox {
public:
    Philox(uint64_t seed, uint64_t stream) {
        key0_ = static_cast<uint32_t>(seed);
        key1_ = static_cast<uint32_t>(seed >> 32);
        stream_lo_ = static_cast<uint32_t>(stream);
        stream_hi_ = static_cast<uint32_t>(stream >> 32);
    }

    PhiloxBlock block(uint64_t counter) const {
        uint32_t c0 = static_cast<uint32_t>(counter);
        uint32_t c1 = static_cast<uint32_t>(counter >> 32);
        uint32_t c2 = stream_lo_;
        uint32_t c3 = stream_hi_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
            const uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            const uint32_t n0 = hi1 ^ c1 ^ k0;
            const uint32_t n1 = lo1;
            const uint32_t n2 = hi0 ^ c3 ^ k1;
            const uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {{c0, c1, c2, c3}};
    }

private:
    uint32_t key0_, key1_, stream_lo_, stream_hi_;
};

// Sequential view of one stream: uniforms drawn in order, position defined
// by a block counter.  Copyable, cheap, no heap.
class RandomStream {
public:
    RandomStream(uint64_t seed, uint64_t stream) : gen_(seed, stream) {}

    // uniform in [0, 1) with 53 random bits
    double uniform() {
        const uint64_t r = next64();
        return static_cast<double>(r >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1) (safe as argument of log or inverse CDFs)
    double uniform_open() {
        const uint64_t r = next64();
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    uint64_t next64() {
        if (idx_ == 0) {
            cur_ = gen_.block(counter_++);
            idx_ = 2;
            return (static_cast<uint64_t>(cur_.w[0]) << 32) | cur_.w[1];
        }
        idx_ = 0;
        return (static_cast<uint64_t>(cur_.w[2]) << 32) | cur_.w[3];
    }

private:
    Philox gen_;
    PhiloxBlock cur_{};
    uint64_t counter_ = 0;
    int idx_ = 0;
};

}  // namespace fdl
