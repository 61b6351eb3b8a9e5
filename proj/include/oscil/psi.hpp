#pragma once

#include <optional>
#include <vector>

#include "oscil/errors.hpp"
#include "oscil/rat.hpp"
#include "oscil/wideint.hpp"

namespace oscil {

// ---------------------------------------------------------------------------
// Matrix and evaluation records
// ---------------------------------------------------------------------------

/// Real m x n matrix with exact rational entries in [0, 1].
///
/// psi(t) = min over integer vectors x, 1 <= max|x_i| <= t, of
///          max_j || theta_j^1 x_1 + ... + theta_j^n x_n ||,
/// where ||.|| is the distance to the nearest integer.
struct MatrixTheta {
    long m = 1, n = 1;
    std::vector<Rat> entries;  // row-major, m*n

    MatrixTheta() = default;
    MatrixTheta(long m_, long n_, std::vector<Rat> e) : m(m_), n(n_), entries(std::move(e)) {
        if (m < 1 || n < 1) throw input_error("MatrixTheta: dimensions must be >= 1");
        if (static_cast<long>(entries.size()) != m * n)
            throw input_error("MatrixTheta: entry count does not match dimensions");
        for (const auto& v : entries)
            if (v < Rat(0) || v > Rat(1))
                throw input_error("MatrixTheta: entries must lie in [0, 1]");
    }

    static MatrixTheta scalar(Rat a) { return {1, 1, {std::move(a)}}; }
    static MatrixTheta row2(Rat a, Rat b) { return {1, 2, {std::move(a), std::move(b)}}; }
    static MatrixTheta column(std::vector<Rat> a) {
        long rows = static_cast<long>(a.size());
        return {rows, 1, std::move(a)};
    }

    const Rat& at(long j, long i) const { return entries[j * n + i]; }

    /// Entrywise 1 - theta; psi is invariant under this reflection.
    MatrixTheta reflected() const {
        std::vector<Rat> e;
        e.reserve(entries.size());
        for (const auto& v : entries) e.push_back(Rat(1) - v);
        return {m, n, std::move(e)};
    }
};

/// One evaluated point of psi: the exact value at height t plus a witness
/// vector x (and the nearest integers p) attaining it.
struct PsiRecord {
    long t = 0;
    Rat value;
    std::vector<long> witness_x;  // length n
    std::vector<Int> witness_p;   // length m

    /// Re-evaluates max_j ||theta_j . x|| at the stored witness.
    Rat recompute(const MatrixTheta& theta) const;
};

struct PsiBudget {
    long long max_points = 1'000'000'000;
};

namespace detail {

inline Int nearest_int(const Rat& v) {
    return (v + Rat(1, 2)).floor();
}

struct RowEval {
    Rat dist;            // max_j distance
    std::vector<Int> p;  // nearest integers per row
};

inline RowEval eval_rows(const MatrixTheta& theta, const std::vector<long>& x) {
    RowEval out;
    out.dist = Rat(0);
    out.p.reserve(theta.m);
    for (long j = 0; j < theta.m; ++j) {
        Rat v(0);
        for (long i = 0; i < theta.n; ++i) v += theta.at(j, i) * Rat(x[i]);
        out.p.push_back(nearest_int(v));
        Rat d = nearest_int_distance(v);
        if (d > out.dist) out.dist = d;
    }
    return out;
}

// Dyadic fast path: all entries have denominators dividing 2^128, so each
// entry is represented exactly by its numerator scaled to 2^128, and
// fractional parts live in u128 arithmetic (wraparound is reduction mod 1).
struct DyadicTheta {
    long m, n;
    std::vector<u128> scaled;  // row-major

    static std::optional<DyadicTheta> from(const MatrixTheta& theta) {
        DyadicTheta d{theta.m, theta.n, {}};
        d.scaled.reserve(theta.entries.size());
        for (const auto& e : theta.entries) {
            const Int& den = e.den();
            if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
            size_t bit = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
            if (bit > 128) return std::nullopt;
            if (bit == 128) {
                d.scaled.push_back(u128_from_int(e.num()));
            } else {
                // num < 2^bit, shift exponent up to 128 (value 1 wraps to 0,
                // which is the same point of the torus)
                Int scaled = e.num() << (128 - bit);
                Int mod = scaled & ((Int(1) << 128) - 1);
                d.scaled.push_back(u128_from_int(mod));
            }
        }
        return d;
    }
};

inline u128 torus_distance(u128 v) {
    u128 neg = ~v + 1;
    return v < neg ? v : neg;
}

inline Rat rat_from_u128_over_2_128(u128 v) {
    return Rat(int_from_u128(v), Int(1) << 128);
}

/// floor(tau * 2^128) clamped to 2^128 - 1; dist <= tau iff
/// dist_u128 <= this threshold (dist ranges over k/2^128 grid points).
inline u128 dyadic_threshold(const Rat& tau) {
    if (tau.sign() < 0) throw input_error("threshold must be nonnegative");
    Int scaled = (tau.num() << 128) / tau.den();
    Int cap = (Int(1) << 128) - 1;
    if (scaled > cap) scaled = cap;
    return u128_from_int(scaled);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// psi_naive: full enumeration oracle (any m, n)
// ---------------------------------------------------------------------------

/// Exact psi by enumerating every admissible x, shell by shell
/// (max|x_i| = s for s = 1..t), using the x <-> -x symmetry: only vectors
/// whose first nonzero coordinate is positive are visited.  Witness is the
/// first vector in (shell, lex) order attaining the minimum.
inline PsiRecord psi_naive(const MatrixTheta& theta, long t, const PsiBudget& budget = {}) {
    if (t < 1) throw input_error("psi_naive: t must be >= 1");
    PsiRecord best;
    best.t = t;
    long long points = 0;
    std::vector<long> x(theta.n, 0);
    bool have = false;
    for (long s = 1; s <= t; ++s) {
        // odometer over the box [-s, s]^n in lex order
        for (long i = 0; i < theta.n; ++i) x[i] = -s;
        while (true) {
            long maxabs = 0;
            bool canonical = false, decided = false;
            for (long i = 0; i < theta.n; ++i) {
                long a = x[i] < 0 ? -x[i] : x[i];
                if (a > maxabs) maxabs = a;
                if (!decided && x[i] != 0) {
                    canonical = x[i] > 0;
                    decided = true;
                }
            }
            if (maxabs == s && canonical) {
                if (++points > budget.max_points)
                    throw resource_error("psi_naive: enumeration budget exceeded");
                detail::RowEval ev = detail::eval_rows(theta, x);
                if (!have || ev.dist < best.value) {
                    have = true;
                    best.value = ev.dist;
                    best.witness_x = x;
                    best.witness_p = std::move(ev.p);
                }
            }
            long i = theta.n - 1;
            while (i >= 0 && x[i] == s) x[i--] = -s;
            if (i < 0) break;
            ++x[i];
        }
    }
    return best;
}

inline Rat PsiRecord::recompute(const MatrixTheta& theta) const {
    return detail::eval_rows(theta, witness_x).dist;
}

// ---------------------------------------------------------------------------
// psi_cf_1d: continued-fraction ladder for m = n = 1
// ---------------------------------------------------------------------------

namespace detail {

/// Continued-fraction convergents p/q of alpha with q <= qmax, in order.
/// The two q = 1 entries that arise when a1 = 1 are both emitted; callers
/// that want "best value at this q" keep the later one.
inline std::vector<std::pair<Int, Int>> cf_convergents(const Rat& alpha, long qmax) {
    std::vector<std::pair<Int, Int>> out;
    Int a = alpha.num(), b = alpha.den();
    Int p_prev(0), q_prev(1), p_cur(1), q_cur(0);  // h_-2/k_-2, h_-1/k_-1
    while (true) {
        Int digit = a / b;  // b > 0
        Int p_next = digit * p_cur + p_prev;
        Int q_next = digit * q_cur + q_prev;
        if (q_next > qmax) break;
        out.push_back({p_next, q_next});
        Int r = a - digit * b;
        p_prev = p_cur; q_prev = q_cur;
        p_cur = p_next; q_cur = q_next;
        if (r == 0) break;  // alpha reached exactly
        a = b;
        b = r;
    }
    return out;
}

}  // namespace detail

/// psi_alpha(t) = |q alpha - p| at the largest convergent denominator
/// q <= t (best approximations are exactly the convergents).
inline PsiRecord psi_cf_1d(const Rat& alpha, long t) {
    if (t < 1) throw input_error("psi_cf_1d: t must be >= 1");
    if (alpha < Rat(0) || alpha > Rat(1)) throw input_error("psi_cf_1d: alpha must be in [0,1]");
    auto convs = detail::cf_convergents(alpha, t);
    // q0 = 1 always qualifies, so the list is never empty
    const auto& [best_p, best_q] = convs.back();
    PsiRecord rec;
    rec.t = t;
    rec.value = (alpha * Rat(best_q) - Rat(best_p)).abs();
    rec.witness_x = {static_cast<long>(best_q.get_si())};
    rec.witness_p = {best_p};
    return rec;
}

// ---------------------------------------------------------------------------
// Incremental sweeps
// ---------------------------------------------------------------------------

namespace detail {

/// Representative points of the shell max(|x1|,|x2|) = s, lex ordered,
/// first nonzero coordinate positive.
template <typename Fn>
inline void form2_shell(long s, Fn&& fn) {
    fn(0L, s);
    for (long x1 = 1; x1 < s; ++x1) {
        fn(x1, -s);
        fn(x1, s);
    }
    for (long x2 = -s; x2 <= s; ++x2) fn(s, x2);
}

inline PsiRecord make_record_form2(const MatrixTheta& theta, long t, long x1, long x2) {
    PsiRecord rec;
    rec.t = t;
    rec.witness_x = {x1, x2};
    RowEval ev = eval_rows(theta, rec.witness_x);
    rec.value = ev.dist;
    rec.witness_p = std::move(ev.p);
    return rec;
}

}  // namespace detail

/// psi for the linear form x1*alpha + x2*beta at every t = 1..T.  One
/// incremental pass: shell t is evaluated and folded into the running
/// minimum, so the output is non-increasing.  Exact throughout; entries
/// with power-of-two denominators (up to 2^128) run on machine words.
inline std::vector<PsiRecord> psi_form2_sweep(const Rat& alpha, const Rat& beta, long T,
                                              const PsiBudget& budget = {}) {
    if (T < 1) throw input_error("psi_form2_sweep: T must be >= 1");
    MatrixTheta theta = MatrixTheta::row2(alpha, beta);
    if (2 * T * T + 2 * T > budget.max_points)
        throw resource_error("psi_form2_sweep: enumeration budget exceeded");
    std::vector<PsiRecord> out;
    out.reserve(T);
    auto dy = detail::DyadicTheta::from(theta);
    if (dy) {
        u128 a = dy->scaled[0], b = dy->scaled[1];
        u128 dmin = 0;
        bool have = false;
        long wx1 = 0, wx2 = 0;
        for (long t = 1; t <= T; ++t) {
            auto consider = [&](u128 v, long x1, long x2) {
                u128 d = detail::torus_distance(v);
                if (!have || d < dmin) {
                    have = true;
                    dmin = d;
                    wx1 = x1;
                    wx2 = x2;
                }
            };
            u128 ta = static_cast<u128>(t) * a;  // wraps mod 2^128 as intended
            u128 tb = static_cast<u128>(t) * b;
            consider(tb, 0, t);
            u128 vp = tb, vm = ~tb + 1;  // x1 * a + (+-t) * b, x1 = 1..t-1
            for (long x1 = 1; x1 < t; ++x1) {
                vp += a;
                vm += a;
                consider(vm, x1, -t);
                consider(vp, x1, t);
            }
            u128 v = ta - tb;  // x1 = t, x2 from -t
            consider(v, t, -t);
            for (long x2 = -t + 1; x2 <= t; ++x2) {
                v += b;
                consider(v, t, x2);
            }
            PsiRecord rec = detail::make_record_form2(theta, t, wx1, wx2);
            out.push_back(std::move(rec));
        }
        return out;
    }
    // generic exact path
    Rat dmin;
    bool have = false;
    long wx1 = 0, wx2 = 0;
    for (long t = 1; t <= T; ++t) {
        detail::form2_shell(t, [&](long x1, long x2) {
            Rat v = alpha * Rat(x1) + beta * Rat(x2);
            Rat d = nearest_int_distance(v);
            if (!have || d < dmin) {
                have = true;
                dmin = d;
                wx1 = x1;
                wx2 = x2;
            }
        });
        out.push_back(detail::make_record_form2(theta, t, wx1, wx2));
    }
    return out;
}

/// Simultaneous regime (m >= 2, n = 1): running minimum over q = 1..T of
/// max_i ||q alpha_i||.
inline std::vector<PsiRecord> psi_simul_sweep(const std::vector<Rat>& alphas, long T,
                                              const PsiBudget& budget = {}) {
    if (T < 1) throw input_error("psi_simul_sweep: T must be >= 1");
    long m = static_cast<long>(alphas.size());
    if (m < 2) throw input_error("psi_simul_sweep: need m >= 2 components");
    MatrixTheta theta = MatrixTheta::column(alphas);
    if (static_cast<long long>(T) * m > budget.max_points)
        throw resource_error("psi_simul_sweep: enumeration budget exceeded");
    std::vector<PsiRecord> out;
    out.reserve(T);
    auto make_record = [&](long t, long q) {
        PsiRecord rec;
        rec.t = t;
        rec.witness_x = {q};
        detail::RowEval ev = detail::eval_rows(theta, rec.witness_x);
        rec.value = ev.dist;
        rec.witness_p = std::move(ev.p);
        return rec;
    };
    auto dy = detail::DyadicTheta::from(theta);
    if (dy) {
        std::vector<u128> v(m, 0);
        u128 dmin = 0;
        bool have = false;
        long wq = 1;
        for (long q = 1; q <= T; ++q) {
            u128 d = 0;
            for (long i = 0; i < m; ++i) {
                v[i] += dy->scaled[i];
                u128 di = detail::torus_distance(v[i]);
                if (di > d) d = di;
            }
            if (!have || d < dmin) {
                have = true;
                dmin = d;
                wq = q;
            }
            out.push_back(make_record(q, wq));
        }
        return out;
    }
    Rat dmin;
    bool have = false;
    long wq = 1;
    for (long q = 1; q <= T; ++q) {
        Rat d(0);
        for (long i = 0; i < m; ++i) {
            Rat di = nearest_int_distance(alphas[i] * Rat(q));
            if (di > d) d = di;
        }
        if (!have || d < dmin) {
            have = true;
            dmin = d;
            wq = q;
        }
        out.push_back(make_record(q, wq));
    }
    return out;
}

/// psi at every t = 1..T for any supported regime.
inline std::vector<PsiRecord> psi_sweep(const MatrixTheta& theta, long T,
                                        const PsiBudget& budget = {}) {
    if (theta.m == 1 && theta.n == 1) {
        // records from the continued-fraction ladder, expanded to a step function
        const Rat& alpha = theta.entries[0];
        auto convs = detail::cf_convergents(alpha, T);
        std::vector<PsiRecord> out;
        out.reserve(T);
        std::size_t next = 0;
        PsiRecord cur;
        for (long t = 1; t <= T; ++t) {
            while (next < convs.size() && convs[next].second <= t) {
                const auto& [p, q] = convs[next];
                cur.value = (alpha * Rat(q) - Rat(p)).abs();
                cur.witness_x = {static_cast<long>(q.get_si())};
                cur.witness_p = {p};
                ++next;
            }
            cur.t = t;
            out.push_back(cur);
        }
        return out;
    }
    if (theta.m == 1 && theta.n == 2)
        return psi_form2_sweep(theta.entries[0], theta.entries[1], T, budget);
    if (theta.n == 1 && theta.m >= 2) return psi_simul_sweep(theta.entries, T, budget);
    throw input_error("psi_sweep: unsupported regime (use psi_naive)");
}

// ---------------------------------------------------------------------------
// Sign sequence of psi_theta - psi_theta'
// ---------------------------------------------------------------------------

/// Exact difference sequence and its sign changes.  diff = 0 carries no
/// sign: a change is strictly-positive to strictly-negative (or back) with
/// any run of zeros in between skipped.
struct SignSeq {
    long T = 0;
    std::vector<Rat> diff;               // diff[t-1] = psi1(t) - psi2(t)
    std::vector<long> change_positions;  // t where the strict sign flips

    long sign_changes() const { return static_cast<long>(change_positions.size()); }
    long changes_up_to(long t) const {
        long c = 0;
        for (long pos : change_positions)
            if (pos <= t) ++c;
        return c;
    }
};

inline SignSeq sign_sequence(const MatrixTheta& theta, const MatrixTheta& theta2, long T,
                             const PsiBudget& budget = {}) {
    if (theta.m != theta2.m || theta.n != theta2.n)
        throw input_error("sign_sequence: matrices must share a regime");
    std::vector<PsiRecord> a = psi_sweep(theta, T, budget);
    std::vector<PsiRecord> b = psi_sweep(theta2, T, budget);
    SignSeq seq;
    seq.T = T;
    seq.diff.reserve(T);
    int last_sign = 0;
    for (long t = 1; t <= T; ++t) {
        Rat d = a[t - 1].value - b[t - 1].value;
        int s = d.sign();
        if (s != 0) {
            if (last_sign != 0 && s != last_sign) seq.change_positions.push_back(t);
            last_sign = s;
        }
        seq.diff.push_back(std::move(d));
    }
    return seq;
}

}  // namespace oscil
