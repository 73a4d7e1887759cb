#pragma once

// Counter-based random numbers: Philox4x32-10 (Salmon, Moraes, Dror, Shaw,
// SC'11).  Every 128-bit counter block is a pure function of (key, counter),
// so parallel replicates are reproducible no matter how work is scheduled:
// we put the replicate/stream id in the high counter word and the draw index
// in the low words, key off the user seed, and never keep generator state.
//
// Determinism contract: bitwise-identical output for a fixed binary on a
// fixed platform (the Box-Muller transform below calls libm, so cross-libm
// bit equality is out of scope; thread count and invocation order never
// matter).

#include <array>
#include <cmath>
#include <cstdint>

namespace selfnorm {

struct Philox4x32 {
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static void round(Block& ctr, const Key& key) {
        const std::uint64_t prod0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
        const std::uint64_t prod1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
        const auto lo0 = static_cast<std::uint32_t>(prod0);
        const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(prod1);
        const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }

    // Ten rounds with the Weyl key schedule; matches the reference
    // known-answer vectors.
    static Block block(Block ctr, Key key) {
        for (int i = 0; i < 10; ++i) {
            if (i != 0) {
                key[0] += kWeylA;
                key[1] += kWeylB;
            }
            round(ctr, key);
        }
        return ctr;
    }

    // Convenience layout used across the library: 64-bit seed as the key,
    // 64-bit stream id in the counter's high half, 64-bit draw index low.
    static Block at(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t index) {
        const Key key = {static_cast<std::uint32_t>(seed),
                         static_cast<std::uint32_t>(seed >> 32)};
        const Block ctr = {static_cast<std::uint32_t>(index),
                           static_cast<std::uint32_t>(index >> 32),
                           static_cast<std::uint32_t>(stream),
                           static_cast<std::uint32_t>(stream >> 32)};
        return block(ctr, key);
    }
};

// Strictly-interior uniform in (0,1) from 64 random bits: 53-bit mantissa
// plus a half-ulp offset, so log() below never sees 0.
inline double uniform01(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Two standard normals per counter block via Box-Muller.
inline void normal_pair(const Philox4x32::Block& b, double& z0, double& z1) {
    const double u1 = uniform01(b[0], b[1]);
    const double u2 = uniform01(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586477 * u2;
    z0 = r * std::cos(theta);
    z1 = r * std::sin(theta);
}

// Random-access normal stream: normals are indexed by position, each position
// is a pure function of (seed, stream, position).  A one-block cache makes
// sequential scans cost one Philox block per pair.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double at(std::uint64_t position) {
        const std::uint64_t pair = position >> 1;
        if (!cached_ || pair != cached_pair_) {
            const auto b = Philox4x32::at(seed_, stream_, pair);
            normal_pair(b, z_[0], z_[1]);
            cached_pair_ = pair;
            cached_ = true;
        }
        return z_[position & 1];
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t cached_pair_ = 0;
    bool cached_ = false;
    double z_[2] = {0.0, 0.0};
};

// Same idea for uniforms: four per block, indexed individually.
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double at(std::uint64_t position) {
        const std::uint64_t blk = position >> 1;
        if (!cached_ || blk != cached_block_) {
            const auto b = Philox4x32::at(seed_, stream_, blk);
            u_[0] = uniform01(b[0], b[1]);
            u_[1] = uniform01(b[2], b[3]);
            cached_block_ = blk;
            cached_ = true;
        }
        return u_[position & 1];
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t cached_block_ = 0;
    bool cached_ = false;
    double u_[2] = {0.0, 0.0};
};

} // namespace selfnorm
