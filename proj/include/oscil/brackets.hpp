#pragma once

#include <utility>
#include <vector>

#include "oscil/rat.hpp"

namespace oscil {

/// Certified enclosure lo <= value <= hi of a (possibly irrational) real.
struct RatInterval {
    Rat lo, hi;

    Rat width() const { return hi - lo; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }

    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    RatInterval operator*(const RatInterval& o) const {
        Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {min(min(a, b), min(c, d)), max(max(a, b), max(c, d))};
    }
    static RatInterval point(const Rat& x) { return {x, x}; }
};

/// Certified bracket of the Riemann zeta value at an integer s >= 2.
/// lo is a dyadic under-approximation of the partial sum over p <= terms;
/// hi adds rounding slack plus the integral tail bound terms^(1-s)/(s-1).
struct ZetaConst {
    long s = 0;
    Rat lo, hi;
    long terms = 0;

    RatInterval interval() const { return {lo, hi}; }
};

namespace detail {

inline ZetaConst zeta_raw(long s, const Rat& tol) {
    // terms P with tail P^(1-s)/(s-1) <= tol/2, i.e. P >= (2/((s-1)tol))^(1/(s-1))
    Rat need = Rat(2) / (Rat(s - 1) * tol);
    long P = 2;
    while (Rat(P).pow(s - 1) < need) {
        P *= 2;
        if (P > (1L << 40)) throw resource_error("zeta: tolerance too small");
    }
    // dyadic accumulation: floor(2^B / p^s) summed; slack P/2^B <= tol/4
    Rat slack_need = Rat(4) * Rat(P) / tol;
    unsigned long B = 1;
    Int scale(2);
    while (Rat(scale) < slack_need) {
        ++B;
        scale <<= 1;
    }
    Int acc = 0;
    Int ps, term;
    for (long p = 1; p <= P; ++p) {
        mpz_ui_pow_ui(ps.get_mpz_t(), static_cast<unsigned long>(p),
                      static_cast<unsigned long>(s));
        mpz_fdiv_q(term.get_mpz_t(), scale.get_mpz_t(), ps.get_mpz_t());
        acc += term;
    }
    Rat lo(acc, scale);
    Rat tail = Rat(1) / (Rat(Int(P)).pow(s - 1) * Rat(s - 1));
    Rat hi = lo + Rat(Int(P), scale) + tail;
    return {s, lo, hi, P};
}

}  // namespace detail

/// Bracket of zeta(s) with width <= tol.  Brackets from successively
/// smaller tolerances are nested: the result intersects the brackets of
/// every coarser power-of-two tolerance level, so lo is non-decreasing
/// and hi non-increasing as tol shrinks.
inline ZetaConst zeta(long s, const Rat& tol) {
    if (s < 2) throw input_error("zeta: s must be >= 2");
    if (!(tol > Rat(0))) throw input_error("zeta: tol must be positive");
    long levels = 0;
    Rat t(1);
    while (t > tol) {
        t /= 2;
        ++levels;
        if (levels > 64) throw resource_error("zeta: tolerance too small");
    }
    ZetaConst out = detail::zeta_raw(s, Rat(1));
    t = Rat(1);
    for (long i = 1; i <= levels; ++i) {
        t /= 2;
        ZetaConst z = detail::zeta_raw(s, t);
        if (z.lo > out.lo) out.lo = z.lo;
        if (z.hi < out.hi) out.hi = z.hi;
        out.terms = z.terms;
    }
    out.s = s;
    return out;
}

namespace detail {

// atanh(z) = sum z^(2j+1)/(2j+1) for 0 <= z <= 1/2; all terms positive,
// tail after J terms bounded by z^(2J+1)/((2J+1)(1-z^2)).
inline RatInterval atanh_bracket(const Rat& z, const Rat& tol) {
    Rat z2 = z * z;
    Rat pow = z;  // z^(2j+1)
    Rat lo(0);
    long j = 0;
    Rat one_minus = Rat(1) - z2;
    while (true) {
        lo += pow / Rat(2 * j + 1);
        Rat tail = pow * z2 / (Rat(2 * j + 3) * one_minus);
        if (tail <= tol) return {lo, lo + tail};
        pow *= z2;
        ++j;
        if (j > 100000) throw resource_error("atanh_bracket: no convergence");
    }
}

}  // namespace detail

/// Certified bracket of ln(x) for rational x > 0, width <= tol.
inline RatInterval ln_bracket(const Rat& x, const Rat& tol) {
    if (!(x > Rat(0))) throw input_error("ln_bracket: x must be positive");
    if (x < Rat(1)) {
        RatInterval r = ln_bracket(x.inv(), tol);
        return {-r.hi, -r.lo};
    }
    // x = 2^r * y with y in [1, 2)
    long r = 0;
    Rat y = x;
    while (y >= Rat(2)) {
        y /= 2;
        ++r;
    }
    Rat half_tol = tol / Rat(2 * (r > 0 ? r + 1 : 1));
    RatInterval ln_y = detail::atanh_bracket((y - Rat(1)) / (y + Rat(1)), half_tol);
    ln_y = {ln_y.lo * Rat(2), ln_y.hi * Rat(2)};
    if (r == 0) return ln_y;
    RatInterval ln2 = detail::atanh_bracket(Rat(1, 3), half_tol);
    ln2 = {ln2.lo * Rat(2), ln2.hi * Rat(2)};
    return {ln_y.lo + Rat(r) * ln2.lo, ln_y.hi + Rat(r) * ln2.hi};
}

/// Floor integer m-th root, plus whether it is exact.
inline std::pair<Int, bool> iroot(const Int& n, unsigned long m) {
    if (n < 0) throw input_error("iroot: negative radicand");
    Int r;
    bool exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), m) != 0;
    return {r, exact};
}

/// Bracket of x^(1/m) for rational x >= 0 at 2^-bits resolution.
inline RatInterval root_bracket(const Rat& x, unsigned long m, unsigned long bits) {
    if (x.sign() < 0) throw input_error("root_bracket: negative radicand");
    // v = floor(x * 2^(m*bits)); r = iroot(v): (r/2^bits)^m <= x < ((r+1)/2^bits)^m
    Int num = x.num() << (m * bits);
    Int v;
    mpz_fdiv_q(v.get_mpz_t(), num.get_mpz_t(), x.den().get_mpz_t());
    auto [r, exact] = iroot(v, m);
    Int scale = Int(1) << bits;
    if (exact && Rat(r, scale).pow(static_cast<long>(m)) == x)
        return RatInterval::point(Rat(r, scale));
    return {Rat(r, scale), Rat(r + 1, scale)};
}

/// Sign of r - sum(c_i * sqrt(n_i)) with c_i rational, n_i nonnegative
/// integers, decided exactly.  Perfect squares fold into the rational
/// part; the irrational remainder is refined until the sign is certain
/// (square roots of distinct non-square integers never sum to a rational,
/// so strict refinement terminates).
inline int cmp_rat_vs_sqrt_sum(const Rat& r,
                               const std::vector<std::pair<Rat, Int>>& terms) {
    Rat rational_part(0);
    std::vector<std::pair<Rat, Int>> surds;
    for (const auto& [c, n] : terms) {
        if (n < 0) throw input_error("cmp_rat_vs_sqrt_sum: negative radicand");
        if (c.is_zero() || n == 0) continue;
        auto [s, exact] = iroot(n, 2);
        if (exact)
            rational_part += c * Rat(s);
        else
            surds.push_back({c, n});
    }
    Rat target = r - rational_part;
    if (surds.empty()) return target.sign();
    for (unsigned long bits = 32; bits <= 4096; bits *= 2) {
        RatInterval sum{Rat(0), Rat(0)};
        for (const auto& [c, n] : surds) {
            RatInterval root = root_bracket(Rat(n), 2, bits);
            RatInterval scaled = c.sign() >= 0 ? RatInterval{c * root.lo, c * root.hi}
                                               : RatInterval{c * root.hi, c * root.lo};
            sum = sum + scaled;
        }
        if (target < sum.lo) return -1;
        if (target > sum.hi) return 1;
    }
    throw resource_error("cmp_rat_vs_sqrt_sum: refinement cap hit");
}

}  // namespace oscil
