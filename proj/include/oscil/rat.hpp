#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "oscil/errors.hpp"

namespace oscil {

using Int = mpz_class;

inline Int int_from_u128(unsigned __int128 v) {
    Int hi(static_cast<unsigned long>(v >> 64));
    hi <<= 64;
    hi += static_cast<unsigned long>(v);
    return hi;
}

/// Exact rational number.  Always canonical: denominator > 0 and
/// gcd(|num|, den) = 1.  All arithmetic and comparisons are exact;
/// no operation ever rounds.
class Rat {
  public:
    Rat() : q_(0) {}
    Rat(int n) : q_(n) {}                    // NOLINT implicit by design
    Rat(long n) : q_(static_cast<signed long>(n)) {}
    Rat(const Int& n) : q_(n) {}
    Rat(const Int& num, const Int& den) : q_(num, den) {
        if (den == 0) throw input_error("Rat: zero denominator");
        q_.canonicalize();
    }
    Rat(long num, long den) : Rat(Int(num), Int(den)) {}
    explicit Rat(const mpq_class& q) : q_(q) { q_.canonicalize(); }
    template <typename U>
    Rat(const __gmp_expr<mpz_t, U>& e) : q_(Int(e)) {}  // NOLINT

    const Int num() const { return q_.get_num(); }
    const Int den() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    Rat operator-() const { return Rat(mpq_class(-q_), canonical_tag{}); }
    Rat operator+(const Rat& o) const { return Rat(mpq_class(q_ + o.q_), canonical_tag{}); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(q_ - o.q_), canonical_tag{}); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(q_ * o.q_), canonical_tag{}); }
    Rat operator/(const Rat& o) const {
        if (o.is_zero()) throw input_error("Rat: division by zero");
        return Rat(mpq_class(q_ / o.q_), canonical_tag{});
    }
    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    bool operator==(const Rat& o) const { return mpq_equal(q_.get_mpq_t(), o.q_.get_mpq_t()) != 0; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const { return cmp(q_, o.q_) < 0; }
    bool operator<=(const Rat& o) const { return cmp(q_, o.q_) <= 0; }
    bool operator>(const Rat& o) const { return cmp(q_, o.q_) > 0; }
    bool operator>=(const Rat& o) const { return cmp(q_, o.q_) >= 0; }

    Rat abs() const { return sign() < 0 ? -*this : *this; }

    Rat inv() const {
        if (is_zero()) throw input_error("Rat: inverse of zero");
        return Rat(den(), num());
    }

    /// Integer power; e may be negative (value must be nonzero then).
    Rat pow(long e) const {
        if (e == 0) return Rat(1);
        if (e < 0) return inv().pow(-e);
        Int n, d;
        mpz_pow_ui(n.get_mpz_t(), num().get_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(d.get_mpz_t(), den().get_mpz_t(), static_cast<unsigned long>(e));
        Rat r;
        r.q_ = mpq_class(n, d);  // already coprime, den > 0
        return r;
    }

    Int floor() const {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return q;
    }
    Int ceil() const {
        Int q;
        mpz_cdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return q;
    }
    /// Fractional part in [0, 1): x - floor(x).
    Rat frac() const {
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        Rat out;
        out.q_ = mpq_class(r, den());  // gcd(r, den) = gcd(num, den) = 1 unless r = 0
        out.q_.canonicalize();
        return out;
    }

    double to_double() const { return q_.get_d(); }

    /// "p/q" when the denominator is not 1, else just "p".
    std::string to_fraction_string() const {
        if (is_integer()) return num().get_str();
        return num().get_str() + "/" + den().get_str();
    }

    std::string to_decimal_string(int sig_digits = 12) const;

    static Rat parse(const std::string& text);

    static Rat from_canonical(mpq_class q) { return Rat(std::move(q), canonical_tag{}); }

  private:
    struct canonical_tag {};
    Rat(mpq_class q, canonical_tag) : q_(std::move(q)) {}
    mpq_class q_;
};

inline Rat abs(const Rat& r) { return r.abs(); }
inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.to_fraction_string();
}

/// Distance from x to the nearest integer, exact, in [0, 1/2].
inline Rat nearest_int_distance(const Rat& x) {
    Rat f = x.frac();
    Rat g = Rat(1) - f;
    return f < g ? f : g;
}

/// Correctly rounded (round half away from zero) decimal rendering with a
/// fixed number of significant digits, scientific notation.  Deterministic:
/// used for all human-readable numeric report fields.
inline std::string Rat::to_decimal_string(int sig_digits) const {
    if (sig_digits < 1) sig_digits = 1;
    if (is_zero()) return "0";
    Int n = num() < 0 ? Int(-num()) : num();
    const Int& d = den();
    // exponent e: 10^e <= n/d < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 10));
    auto scaled_digits = [&](long exp10) {
        // round(n/d * 10^(sig-1-exp10)), half away from zero
        Int nn = n, dd = d;
        long s = sig_digits - 1 - exp10;
        Int p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(s >= 0 ? s : -s));
        if (s >= 0) nn *= p; else dd *= p;
        Int q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), nn.get_mpz_t(), dd.get_mpz_t());
        if (Int(2 * r) >= dd) q += 1;
        return q;
    };
    Int digits = scaled_digits(e);
    Int lo, hi;
    mpz_ui_pow_ui(lo.get_mpz_t(), 10, static_cast<unsigned long>(sig_digits - 1));
    mpz_ui_pow_ui(hi.get_mpz_t(), 10, static_cast<unsigned long>(sig_digits));
    while (digits < lo) { e -= 1; digits = scaled_digits(e); }
    while (digits >= hi) { e += 1; digits = scaled_digits(e); }
    std::string ds = digits.get_str();
    std::string mant = ds.substr(0, 1) + "." + ds.substr(1);
    char buf[16];
    std::snprintf(buf, sizeof buf, "e%+03ld", e);
    std::string out = (sign() < 0 ? "-" : "") + mant + buf;
    return out;
}

/// Accepts "p/q", plain integers, and decimal strings ("0.25", "-1.5e-3"
/// is not supported; decimals are exact power-of-ten rationals).
inline Rat Rat::parse(const std::string& text) {
    if (text.empty()) throw input_error("Rat: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string ns = text.substr(0, slash), ds = text.substr(slash + 1);
        Int n, d;
        if (n.set_str(ns, 10) != 0 || d.set_str(ds, 10) != 0)
            throw input_error("Rat: cannot parse '" + text + "'");
        if (d == 0) throw input_error("Rat: zero denominator in '" + text + "'");
        return Rat(n, d);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string whole = text.substr(0, dot), fracpart = text.substr(dot + 1);
        if (fracpart.find_first_not_of("0123456789") != std::string::npos)
            throw input_error("Rat: cannot parse '" + text + "'");
        bool neg = !whole.empty() && whole[0] == '-';
        if (whole == "-" || whole.empty()) whole = neg ? "-0" : "0";
        Int w;
        if (w.set_str(whole, 10) != 0)
            throw input_error("Rat: cannot parse '" + text + "'");
        Int scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fracpart.size());
        Int f(0);
        if (!fracpart.empty() && f.set_str(fracpart, 10) != 0)
            throw input_error("Rat: cannot parse '" + text + "'");
        Int n = w * scale + (neg ? -f : f);
        return Rat(n, scale);
    }
    Int n;
    if (n.set_str(text, 10) != 0) throw input_error("Rat: cannot parse '" + text + "'");
    return Rat(n);
}

}  // namespace oscil
