#pragma once

#include <cstdint>

#include "oscil/rat.hpp"

namespace oscil {

/// Counter-based deterministic random stream (SplitMix64 finalizer over a
/// keyed counter).  Any block is addressable in O(1) from (seed, stream,
/// index), so samples can be generated in any order by any number of
/// workers with byte-identical results.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(seed ^ mix(stream_id ^ 0x9E3779B97F4A7C15ULL))) {}

    std::uint64_t block(std::uint64_t index) const {
        return mix(key_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform value in [0, 2^bits) as an exact integer, bits <= 512.
    Int uniform_bits(std::uint64_t index, unsigned bits) const {
        Int v(0);
        unsigned words = (bits + 63) / 64;
        for (unsigned w = 0; w < words; ++w) {
            v <<= 64;
            v += Int(static_cast<unsigned long>(block(index * 8 + w)));
        }
        unsigned excess = words * 64 - bits;
        if (excess) v >>= excess;
        return v;
    }

    /// Uniform dyadic rational a / 2^bits with a in [0, 2^bits).
    Rat uniform_rat(std::uint64_t index, unsigned bits) const {
        return Rat(uniform_bits(index, bits), Int(1) << bits);
    }

    /// Same value as uniform_bits(index, 128), on machine words.
    unsigned __int128 uniform_u128(std::uint64_t index) const {
        return (static_cast<unsigned __int128>(block(index * 8)) << 64) |
               block(index * 8 + 1);
    }

    /// Uniform integer in [0, n), n < 2^63; uses 128-bit rejection-free
    /// multiply-shift (bias < 2^-64, fine for test-case shaping).
    std::uint64_t below(std::uint64_t index, std::uint64_t n) const {
        unsigned __int128 prod = static_cast<unsigned __int128>(block(index)) * n;
        return static_cast<std::uint64_t>(prod >> 64);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
};

}  // namespace oscil
