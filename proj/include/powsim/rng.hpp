#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace powsim::prob {

// Counter-based random source (Philox4x32-10).  A stream is identified by
// (seed, stream_id); the 128-bit counter block carries the 64-bit draw
// counter in the low words and the stream id in the high words, so distinct
// stream ids index disjoint counter ranges under the same key.  Draw
// sequences depend only on (seed, stream_id), never on thread scheduling.
class RandomSource {
public:
    RandomSource(uint64_t seed, uint64_t stream_id)
        : seed_(seed), stream_(stream_id) {}

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint32_t next_u32() {
        if (pos_ == 4) refill();
        return block_[static_cast<size_t>(pos_++)];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on the open interval (0, 1); 53-bit resolution.
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via inverse cdf; exactly one uniform per draw.
    double next_normal();

    // A statistically independent source derived from this one, for nested
    // Monte Carlo loops.  Deterministic in (seed, stream, k).
    RandomSource child(uint64_t k) const {
        uint64_t a = mix64(seed_ ^ mix64(stream_ + 0x9E3779B97F4A7C15ULL * (k + 1)));
        uint64_t b = mix64(stream_ ^ mix64(seed_ + 0xBF58476D1CE4E5B9ULL * (k + 2)));
        return RandomSource(a, b);
    }

    static uint64_t mix64(uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    void refill();

    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> block_{};
    int pos_ = 4;
};

}  // namespace powsim::prob
