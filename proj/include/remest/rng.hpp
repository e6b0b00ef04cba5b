#pragma once

#include <cstdint>
#include <cmath>

namespace remest {

// Stateless splitmix64 finalizer, used for seeding and stream mixing.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seeded random stream (xoshiro256++). A stream is fully identified by
// (seed, stream_id): identical pairs reproduce the same draw sequence
// bit for bit, distinct stream ids give statistically independent
// sequences. Streams are cheap to construct, so simulations derive one
// substream per replication.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t mix = stream_id;
        std::uint64_t chain = seed ^ splitmix64_next(mix);
        for (auto& word : state_) word = splitmix64_next(chain);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw in the open interval (0, 1); never returns 0 or 1,
    // so it is safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Marsaglia polar method. Pairs are cached,
    // the cache is part of the stream state.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        has_cached_ = true;
        return u * m;
    }

    double exponential(double rate) {
        return -std::log(uniform01()) / rate;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Substream id for replication `index` under a namespace `salt`. Salts
// below 2^32 never collide across indices below 2^32.
inline std::uint64_t substream_id(std::uint64_t salt, std::uint64_t index) {
    return (salt << 32) ^ index;
}

}  // namespace remest
