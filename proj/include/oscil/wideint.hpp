#pragma once

#include <cassert>
#include <cstdint>

#include "oscil/rat.hpp"

namespace oscil {

using u128 = unsigned __int128;
using i128 = __int128;

inline u128 u128_from_int(const Int& v) {
    assert(v >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 128);
    Int hi = v >> 64;
    Int lo = v - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

/// Fixed-width little-endian unsigned integer, N 64-bit limbs.  Just the
/// operations the sweep-line kernels need; overflow is asserted away (the
/// callers size N from exact bit bounds before choosing this path).
template <int N>
struct WideU {
    std::uint64_t w[N] = {};

    static WideU from_int(const Int& v) {
        assert(v >= 0);
        assert(mpz_sizeinbase(v.get_mpz_t(), 2) <= static_cast<size_t>(64 * N));
        WideU r;
        Int t = v;
        for (int i = 0; i < N; ++i) {
            Int hi = t >> 64;
            r.w[i] = static_cast<std::uint64_t>(Int(t - (hi << 64)).get_ui());
            t = hi;
        }
        return r;
    }

    Int to_int() const {
        Int v = 0;
        for (int i = N - 1; i >= 0; --i) {
            v <<= 64;
            v += Int(static_cast<unsigned long>(w[i]));
        }
        return v;
    }

    int cmp(const WideU& o) const {
        for (int i = N - 1; i >= 0; --i) {
            if (w[i] != o.w[i]) return w[i] < o.w[i] ? -1 : 1;
        }
        return 0;
    }
    bool operator<(const WideU& o) const { return cmp(o) < 0; }
    bool operator==(const WideU& o) const { return cmp(o) == 0; }

    WideU& operator+=(const WideU& o) {
        u128 carry = 0;
        for (int i = 0; i < N; ++i) {
            u128 s = static_cast<u128>(w[i]) + o.w[i] + carry;
            w[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
        assert(carry == 0);
        return *this;
    }

    WideU& operator-=(const WideU& o) {
        assert(!(*this < o));
        u128 borrow = 0;
        for (int i = 0; i < N; ++i) {
            u128 d = static_cast<u128>(w[i]) - o.w[i] - borrow;
            w[i] = static_cast<std::uint64_t>(d);
            borrow = (d >> 64) & 1;
        }
        return *this;
    }

    WideU operator+(const WideU& o) const { WideU r = *this; r += o; return r; }
    WideU operator-(const WideU& o) const { WideU r = *this; r -= o; return r; }
};

/// Schoolbook product into a wider accumulator.
template <int NA, int NB>
inline WideU<NA + NB> wide_mul(const WideU<NA>& a, const WideU<NB>& b) {
    WideU<NA + NB> r;
    for (int i = 0; i < NA; ++i) {
        if (a.w[i] == 0) continue;
        u128 carry = 0;
        for (int j = 0; j < NB; ++j) {
            u128 cur = static_cast<u128>(a.w[i]) * b.w[j] + r.w[i + j] + carry;
            r.w[i + j] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        int pos = i + NB;
        while (carry) {
            assert(pos < NA + NB);
            u128 cur = static_cast<u128>(r.w[pos]) + carry;
            r.w[pos] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
            ++pos;
        }
    }
    return r;
}

}  // namespace oscil
