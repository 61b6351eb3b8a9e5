#pragma once

// Linear-form regime (m = 1, n = 2).  The plane [0,1]^2 of coefficient
// pairs (alpha, beta) is covered by strip families
//   A(x1, x2, q) = { |x1 alpha + x2 beta - q| <= eps / k^2 },
// and M_k-bar is the union over 1 <= max(|x1|, |x2|) <= k.  Everything
// here is exact: fiber lengths are unions of rational intervals computed
// with integer sweep keys, and the two-dimensional measure is the exact
// integral of the piecewise-linear fiber length over beta.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "oscil/brackets.hpp"
#include "oscil/geom.hpp"
#include "oscil/intervals.hpp"
#include "oscil/mat2.hpp"
#include "oscil/parallel.hpp"
#include "oscil/psi.hpp"
#include "oscil/rng.hpp"
#include "oscil/stats.hpp"
#include "oscil/wideint.hpp"

namespace oscil {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Axis-aligned square S = [x, x + side] x [y, y + side].
struct Square {
    Vec2 corner;
    Rat side;

    Square(Vec2 c, Rat s) : corner(std::move(c)), side(std::move(s)) {
        if (!(side > Rat(0))) throw input_error("Square: side must be positive");
    }
    static Square unit() { return {{Rat(0), Rat(0)}, Rat(1)}; }
    static Square centered(const Rat& cx, const Rat& cy, const Rat& side) {
        return {{cx - side / 2, cy - side / 2}, side};
    }
    Rat x_lo() const { return corner.x; }
    Rat x_hi() const { return corner.x + side; }
    Rat y_lo() const { return corner.y; }
    Rat y_hi() const { return corner.y + side; }
    Rat area() const { return side * side; }
    bool inside_unit_square() const {
        return corner.x >= Rat(0) && corner.y >= Rat(0) && x_hi() <= Rat(1) && y_hi() <= Rat(1);
    }
};

/// One strip family A(x1, x2) = union over q of A(x1, x2, q).
struct StripFamily {
    long x1 = 0, x2 = 0;
    Rat eps;
    long k = 2;

    StripFamily(long x1_, long x2_, Rat eps_, long k_)
        : x1(x1_), x2(x2_), eps(std::move(eps_)), k(k_) {
        if (x1 == 0 && x2 == 0) throw input_error("StripFamily: (0,0) not allowed");
        if (k < 2) throw input_error("StripFamily: k must be >= 2");
        if (!(eps > Rat(0) && eps < Rat(1))) throw input_error("StripFamily: eps in (0,1)");
    }
    /// Half-width eps / k^2 of each strip.
    Rat half_width() const { return eps / Rat(Int(k) * Int(k)); }
    bool primitive() const {
        long a = x1 < 0 ? -x1 : x1, b = x2 < 0 ? -x2 : x2;
        return std::gcd(a, b) == 1;
    }
};

/// Intersection structure of two strip families: parallelogram cells whose
/// centers form the lattice spanned by (y2, -x2)/det and (-y1, x1)/det.
struct CenterLattice {
    Mat2 t;  // rows (x1, x2), (y1, y2)
    Rat eps;
    long k = 2;

    CenterLattice(Mat2 m, Rat eps_, long k_) : t(std::move(m)), eps(std::move(eps_)), k(k_) {
        if (t.singular()) throw input_error("CenterLattice: determinant must be nonzero");
    }
    Int delta() const { return t.abs_det(); }

    Rat tau() const { return eps / Rat(Int(k) * Int(k)); }

    /// Vertices of A(x, q1) cap A(y, q2): the four solutions of
    /// x . v = q1 +- tau, y . v = q2 +- tau, counterclockwise.
    std::vector<Vec2> parallelogram(const Rat& q1, const Rat& q2) const {
        Rat tauv = tau();
        Rat det(t.det());
        auto solve = [&](const Rat& r1, const Rat& r2) -> Vec2 {
            // inverse of ((x1, x2), (y1, y2)) applied to (r1, r2)
            Rat a = (r1 * Rat(t.y2) - r2 * Rat(t.x2)) / det;
            Rat b = (r2 * Rat(t.x1) - r1 * Rat(t.y1)) / det;
            return {a, b};
        };
        std::vector<Vec2> v = {solve(q1 - tauv, q2 - tauv), solve(q1 + tauv, q2 - tauv),
                               solve(q1 + tauv, q2 + tauv), solve(q1 - tauv, q2 + tauv)};
        // orientation depends on sign(det); normalize to ccw
        Rat twice = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[1].y - v[0].y) * (v[2].x - v[0].x);
        if (twice.sign() < 0) std::swap(v[1], v[3]);
        return v;
    }

    static Rat polygon_area(const std::vector<Vec2>& v) {
        Rat twice(0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % v.size()];
            twice += a.x * b.y - b.x * a.y;
        }
        return twice.abs() / Rat(2);
    }

    static Rat polygon_diameter_sq(const std::vector<Vec2>& v) {
        Rat best(0);
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                Rat dx = v[i].x - v[j].x, dy = v[i].y - v[j].y;
                Rat d = dx * dx + dy * dy;
                if (d > best) best = d;
            }
        return best;
    }

    static Vec2 centroid(const std::vector<Vec2>& v) {
        Rat sx(0), sy(0);
        for (const auto& p : v) {
            sx += p.x;
            sy += p.y;
        }
        return {sx / Rat(static_cast<long>(v.size())), sy / Rat(static_cast<long>(v.size()))};
    }

    /// The parallelogram centers solve t . v = (q1, q2), so the center
    /// lattice is exactly { v : t . v integer } -- the integer span of the
    /// columns of t^{-1}, (y2, -y1)/det and (-x2, x1)/det.
    bool on_lattice(const Vec2& p) const {
        Rat i = p.x * Rat(t.x1) + p.y * Rat(t.x2);
        Rat j = p.x * Rat(t.y1) + p.y * Rat(t.y2);
        return i.is_integer() && j.is_integer();
    }

    std::pair<Vec2, Vec2> basis() const {
        Rat det{t.det()};
        return {Vec2{Rat(t.y2) / det, -Rat(t.y1) / det},
                Vec2{-Rat(t.x2) / det, Rat(t.x1) / det}};
    }
};

/// E_k (primitive pairs in the top-right band) and E*_k (all pairs with
/// 1 <= x1 <= k, 1 <= |x2| <= k).
struct PrimitivePairSet {
    enum class Variant { E, EStar };
    long k;
    Variant variant;
    std::vector<std::pair<long, long>> pairs;

    static PrimitivePairSet make_E(long k) {
        PrimitivePairSet s{k, Variant::E, {}};
        long lo = (k + 1) / 2;  // ceil(k/2)
        for (long a = lo; a <= k; ++a)
            for (long b = lo; b <= k; ++b)
                if (std::gcd(a, b) == 1) s.pairs.push_back({a, b});
        return s;
    }
    static PrimitivePairSet make_EStar(long k) {
        PrimitivePairSet s{k, Variant::EStar, {}};
        for (long a = 1; a <= k; ++a)
            for (long b = -k; b <= k; ++b)
                if (b != 0) s.pairs.push_back({a, b});
        return s;
    }
};

enum class MeasureMethod { exact_fiber_integration, fiber_mc, point_mc };

inline const char* measure_method_name(MeasureMethod m) {
    switch (m) {
        case MeasureMethod::exact_fiber_integration: return "exact-fiber-integration";
        case MeasureMethod::fiber_mc: return "fiber-mc";
        case MeasureMethod::point_mc: return "point-mc";
    }
    return "?";
}

/// A measure value with provenance.  Exact methods carry ci_halfwidth 0;
/// Monte-Carlo methods carry a Hoeffding half-width at confidence 1-1e-6.
struct MeasureEstimate {
    Rat value;
    Rat ci_halfwidth;
    MeasureMethod method = MeasureMethod::point_mc;
    long samples = 0;
    // provenance
    long k = 0;
    Rat eps;
    std::optional<Square> region;
};

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

/// (alpha, beta) in M_k-bar  <=>  psi_(alpha beta)(k) <= eps/k^2.
/// Entries with denominators dividing 2^128 run on the machine-word path:
/// dist <= tau  <=>  dist * 2^128 <= floor(tau * 2^128).
inline bool membership_mbar_2d(const Rat& alpha, const Rat& beta, long k, const Rat& eps,
                               PsiRecord* witness = nullptr) {
    if (k < 2) throw input_error("membership_mbar_2d: k must be >= 2");
    Rat tau = eps / Rat(Int(k) * Int(k));
    MatrixTheta theta = MatrixTheta::row2(alpha, beta);
    auto dy = detail::DyadicTheta::from(theta);
    if (dy && !witness) {
        u128 a = dy->scaled[0], b = dy->scaled[1];
        u128 thr = detail::dyadic_threshold(tau);
        for (long t = 1; t <= k; ++t) {
            u128 ta = static_cast<u128>(t) * a;
            u128 tb = static_cast<u128>(t) * b;
            if (detail::torus_distance(tb) <= thr) return true;
            u128 vp = tb, vm = ~tb + 1;
            for (long x1 = 1; x1 < t; ++x1) {
                vp += a;
                vm += a;
                if (detail::torus_distance(vp) <= thr) return true;
                if (detail::torus_distance(vm) <= thr) return true;
            }
            u128 v = ta - tb;
            if (detail::torus_distance(v) <= thr) return true;
            for (long x2 = -t + 1; x2 <= t; ++x2) {
                v += b;
                if (detail::torus_distance(v) <= thr) return true;
            }
        }
        return false;
    }
    auto sweep = psi_form2_sweep(alpha, beta, k);
    const PsiRecord& last = sweep.back();
    if (last.value <= tau) {
        if (witness) *witness = last;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Exact fiber machinery
// ---------------------------------------------------------------------------

namespace detail2d {

/// Strip rows entering a fiber computation: the x1 >= 1 rows carry interval
/// families on the alpha axis; the x1 = 0 rows cover all alpha or none.
struct FiberSpec {
    std::vector<std::pair<long, long>> rows;  // (x1, x2), x1 >= 1
    std::vector<long> zero_rows;              // x2 >= 1 (x1 = 0 strips)

    static FiberSpec full(long k) {
        FiberSpec s;
        s.rows.reserve(static_cast<std::size_t>(k) * (2 * k + 1));
        for (long x1 = 1; x1 <= k; ++x1)
            for (long x2 = -k; x2 <= k; ++x2) s.rows.push_back({x1, x2});
        for (long x2 = 1; x2 <= k; ++x2) s.zero_rows.push_back(x2);
        return s;
    }
};

constexpr long kMaxFiberIntervals = 80'000'000;

struct MpzKeyOps {
    using Key = Int;
    std::vector<Int> lx;   // L / x1
    std::vector<Int> step;  // C * L / x1

    Key make(const Int& num, long x1) const { return Int(num * lx[x1]); }
    const Key& step_for(long x1) const { return step[x1]; }
    static void add_step(Key& k, const Key& s) { k += s; }
    static void accumulate(Key& acc, const Key& end, const Key& start) {
        acc += end - start;
    }
    static Int to_int(const Key& k) { return k; }
};

template <int N>
struct FixedKeyOps {
    using Key = WideU<N>;
    std::vector<WideU<3>> lx;
    std::vector<Key> step;
    Key offset;  // 2 * L * C keeps keys nonnegative

    Key make(const Int& num, long x1) const {
        WideU<3> a;
        std::size_t limbs = mpz_size(num.get_mpz_t());
        assert(limbs <= 3);
        for (std::size_t i = 0; i < 3; ++i)
            a.w[i] = i < limbs ? mpz_getlimbn(num.get_mpz_t(), i) : 0;
        WideU<6> prod = wide_mul(a, lx[x1]);
        Key r = offset;
        Key p;
        for (int i = 0; i < N; ++i) p.w[i] = prod.w[i];
        for (int i = N; i < 6; ++i) assert(prod.w[i] == 0);
        if (mpz_sgn(num.get_mpz_t()) < 0)
            r -= p;
        else
            r += p;
        return r;
    }
    const Key& step_for(long x1) const { return step[x1]; }
    static void add_step(Key& k, const Key& s) { k += s; }
    static void accumulate(Key& acc, const Key& end, const Key& start) {
        Key d = end;
        d -= start;
        acc += d;
    }
    static Int to_int(const Key& k) { return k.to_int(); }
};

template <typename Ops>
Rat fiber_sweep(const Ops& ops, const FiberSpec& spec, const Int& C, const Int& BnC,
                const Int& TnC, const Int& W1C, const Int& W2C, const Rat& scale_den,
                const Rat& window_len) {
    using Key = typename Ops::Key;
    struct Ev {
        Key key;
        int dir;  // +1 start, -1 end
    };
    std::vector<Ev> events;
    Key kw_lo = ops.make(W1C, 1), kw_hi = ops.make(W2C, 1);
    long long total_intervals = 0;
    // preallocated scratch keeps the hot loop free of mpz allocations
    Int off, bound, qlo, qhi, span, n0;
    long last_x1 = 0;
    Int x1w1, x1w2;
    for (const auto& [x1, x2] : spec.rows) {
        if (x1 != last_x1) {
            last_x1 = x1;
            mpz_mul_si(x1w1.get_mpz_t(), W1C.get_mpz_t(), x1);
            mpz_mul_si(x1w2.get_mpz_t(), W2C.get_mpz_t(), x1);
        }
        mpz_mul_si(off.get_mpz_t(), BnC.get_mpz_t(), x2);
        // q range so that the strip instance can reach the window
        mpz_add(bound.get_mpz_t(), x1w1.get_mpz_t(), off.get_mpz_t());
        mpz_sub(bound.get_mpz_t(), bound.get_mpz_t(), TnC.get_mpz_t());
        mpz_cdiv_q(qlo.get_mpz_t(), bound.get_mpz_t(), C.get_mpz_t());
        mpz_add(bound.get_mpz_t(), x1w2.get_mpz_t(), off.get_mpz_t());
        mpz_add(bound.get_mpz_t(), bound.get_mpz_t(), TnC.get_mpz_t());
        mpz_fdiv_q(qhi.get_mpz_t(), bound.get_mpz_t(), C.get_mpz_t());
        if (qhi < qlo) continue;
        mpz_sub(span.get_mpz_t(), qhi.get_mpz_t(), qlo.get_mpz_t());
        long count = mpz_get_si(span.get_mpz_t()) + 1;
        total_intervals += count;
        if (total_intervals > kMaxFiberIntervals)
            throw resource_error("fiber sweep: interval budget exceeded");
        mpz_mul(n0.get_mpz_t(), qlo.get_mpz_t(), C.get_mpz_t());
        mpz_sub(n0.get_mpz_t(), n0.get_mpz_t(), off.get_mpz_t());
        mpz_sub(bound.get_mpz_t(), n0.get_mpz_t(), TnC.get_mpz_t());
        Key lo = ops.make(bound, x1);
        mpz_add(bound.get_mpz_t(), n0.get_mpz_t(), TnC.get_mpz_t());
        Key hi = ops.make(bound, x1);
        const Key& step = ops.step_for(x1);
        for (long i = 0; i < count; ++i) {
            if (!(hi < kw_lo || kw_hi < lo)) {
                Key clo = lo < kw_lo ? kw_lo : lo;
                Key chi = kw_hi < hi ? kw_hi : hi;
                events.push_back({clo, 1});
                events.push_back({chi, -1});
            }
            Ops::add_step(lo, step);
            Ops::add_step(hi, step);
        }
    }
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
        if (a.key < b.key) return true;
        if (b.key < a.key) return false;
        return a.dir > b.dir;  // starts first: touching intervals merge
    });
    Key acc{};
    long depth = 0;
    const Key* start = nullptr;
    for (const auto& ev : events) {
        if (ev.dir > 0) {
            if (depth == 0) start = &ev.key;
            ++depth;
        } else {
            --depth;
            if (depth == 0) Ops::accumulate(acc, ev.key, *start);
        }
    }
    Rat len = Rat(Ops::to_int(acc)) / scale_den;
    return len > window_len ? window_len : len;
}

/// Exact length of { alpha in [wlo, whi] : some strip of the family covers
/// (alpha, beta) }.
inline Rat fiber_union_length(const FiberSpec& spec, const Rat& beta, const Rat& tau,
                              const Rat& wlo, const Rat& whi) {
    if (whi < wlo) throw input_error("fiber_union_length: empty window");
    if (!(tau > Rat(0))) throw input_error("fiber_union_length: tau must be positive");
    Rat window_len = whi - wlo;
    if (window_len.is_zero()) return Rat(0);
    for (long x2 : spec.zero_rows)
        if (nearest_int_distance(Rat(x2) * beta) <= tau) return window_len;
    if (spec.rows.empty()) return Rat(0);

    long max_x1 = 1;
    for (const auto& [x1, x2] : spec.rows) {
        if (x1 < 1) throw input_error("fiber_union_length: rows need x1 >= 1");
        if (x1 > max_x1) max_x1 = x1;
    }
    Int C = beta.den() * tau.den() * wlo.den() * whi.den();
    Int BnC = beta.num() * Int(C / beta.den());
    Int TnC = tau.num() * Int(C / tau.den());
    Int W1C = wlo.num() * Int(C / wlo.den());
    Int W2C = whi.num() * Int(C / whi.den());
    Int L(1);
    for (long x = 2; x <= max_x1; ++x) {
        Int xi(x);
        L = L / gcd(L, xi) * xi;  // lcm
    }
    Rat scale_den = Rat(Int(L * C));

    // endpoint numerators carry a factor x1: |num| <= (M + 3) * max_x1 * C
    // with M the window magnitude; keys stay within ~5 * L * C.
    Int window_mag = max(wlo.abs(), whi.abs()).ceil() + 3;
    Int num_max = window_mag * Int(max_x1) * C;
    std::size_t key_bits = mpz_sizeinbase(L.get_mpz_t(), 2) +
                           mpz_sizeinbase(C.get_mpz_t(), 2) +
                           mpz_sizeinbase(window_mag.get_mpz_t(), 2);
    if (wlo.sign() >= 0 && key_bits + 3 <= 384 &&
        mpz_sizeinbase(num_max.get_mpz_t(), 2) <= 192) {
        auto run = [&](auto ops) {
            ops.lx.resize(max_x1 + 1);
            ops.step.resize(max_x1 + 1);
            for (long x = 1; x <= max_x1; ++x) {
                Int v = L / x;
                WideU<3> w{};
                for (std::size_t i = 0; i < 3; ++i)
                    w.w[i] = i < mpz_size(v.get_mpz_t()) ? mpz_getlimbn(v.get_mpz_t(), i) : 0;
                ops.lx[x] = w;
                ops.step[x] = decltype(ops.offset)::from_int(Int(v * C));
            }
            ops.offset = decltype(ops.offset)::from_int(Int(2 * L * C));
            return fiber_sweep(ops, spec, C, BnC, TnC, W1C, W2C, scale_den, window_len);
        };
        if (key_bits + 3 <= 256) return run(FixedKeyOps<4>{});
        if (key_bits + 3 <= 320) return run(FixedKeyOps<5>{});
        return run(FixedKeyOps<6>{});
    }
    MpzKeyOps ops;
    ops.lx.resize(max_x1 + 1);
    ops.step.resize(max_x1 + 1);
    for (long x = 1; x <= max_x1; ++x) {
        ops.lx[x] = L / x;
        ops.step[x] = Int(ops.lx[x] * C);
    }
    return fiber_sweep(ops, spec, C, BnC, TnC, W1C, W2C, scale_den, window_len);
}

}  // namespace detail2d

/// Exact fiber slice of the M_k-bar union: length of
/// { alpha in window : exists (x1,x2), 1 <= max(|x1|,|x2|) <= k, q with
///   |x1 alpha + x2 beta - q| <= eps/k^2 }.
inline Rat fiber_measure_mbar(const Rat& beta, long k, const Rat& eps,
                              const Rat& window_lo, const Rat& window_hi) {
    if (k < 2) throw input_error("fiber_measure_mbar: k must be >= 2");
    Rat tau = eps / Rat(Int(k) * Int(k));
    return detail2d::fiber_union_length(detail2d::FiberSpec::full(k), beta, tau, window_lo,
                                        window_hi);
}

// ---------------------------------------------------------------------------
// Exact two-dimensional measure by fiber integration
// ---------------------------------------------------------------------------

namespace detail2d {

/// Exact mu(union of strips cap S): the fiber length F(beta) is piecewise
/// linear; its breakpoints are coincidences of the affine endpoint
/// functions (q +- tau - x2 beta)/x1 with each other, with the window
/// edges, and with the x1 = 0 toggles.  All candidate events are
/// enumerated, the relevant ones sorted, and the integral accumulated as
/// gap * F(midpoint), exactly.
inline Rat exact_union_measure(const FiberSpec& spec, const Rat& tau, const Square& S) {
    Rat wlo = S.x_lo(), whi = S.x_hi(), blo = S.y_lo(), bhi = S.y_hi();
    struct Fn {
        Rat a, b;  // value(beta) = a - b * beta
    };
    std::vector<Fn> fns;
    fns.push_back({wlo, Rat(0)});
    fns.push_back({whi, Rat(0)});
    for (const auto& [x1, x2] : spec.rows) {
        Rat r1 = Rat(x1), rx2 = Rat(x2);
        Rat m1 = min(rx2 * blo, rx2 * bhi), m2 = max(rx2 * blo, rx2 * bhi);
        Int qlo = (r1 * wlo + m1 - tau).ceil();
        Int qhi = (r1 * whi + m2 + tau).floor();
        for (Int q = qlo; q <= qhi; ++q) {
            fns.push_back({(Rat(q) - tau) / r1, rx2 / r1});
            fns.push_back({(Rat(q) + tau) / r1, rx2 / r1});
        }
    }
    std::vector<Rat> events;
    events.push_back(blo);
    events.push_back(bhi);
    // endpoint-coincidence candidates with value inside the alpha window
    for (std::size_t i = 0; i < fns.size(); ++i) {
        for (std::size_t j = i + 1; j < fns.size(); ++j) {
            if (fns[i].b == fns[j].b) continue;
            Rat beta = (fns[i].a - fns[j].a) / (fns[i].b - fns[j].b);
            if (beta <= blo || beta >= bhi) continue;
            Rat value = fns[i].a - fns[i].b * beta;
            if (value < wlo || value > whi) continue;
            events.push_back(std::move(beta));
        }
    }
    // x1 = 0 rows toggle at ||x2 beta|| = tau
    for (long x2 : spec.zero_rows) {
        Rat rx2{x2};
        Int qlo = (rx2 * blo - tau).ceil();
        Int qhi = (rx2 * bhi + tau).floor();
        for (Int q = qlo; q <= qhi; ++q) {
            for (int s : {-1, 1}) {
                Rat beta = (Rat(q) + (s > 0 ? tau : -tau)) / rx2;
                if (beta > blo && beta < bhi) events.push_back(std::move(beta));
            }
        }
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    Rat total(0);
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        Rat gap = events[i + 1] - events[i];
        Rat mid = (events[i] + events[i + 1]) / Rat(2);
        total += gap * fiber_union_length(spec, mid, tau, wlo, whi);
    }
    return total;
}

}  // namespace detail2d

/// Exact clipped measure of a single strip family A(x1, x2) inside S
/// (mu = 2 eps / k^2 per unit area for primitive pairs).
inline Rat strip_measure(const StripFamily& f, const Square& S) {
    if (f.x1 == 0) {
        // horizontal strips: swap axes and reuse the vertical machinery
        detail2d::FiberSpec swapped;
        swapped.rows.push_back({f.x2 < 0 ? -f.x2 : f.x2, 0});
        Square flipped({S.corner.y, S.corner.x}, S.side);
        return detail2d::exact_union_measure(swapped, f.half_width(), flipped);
    }
    detail2d::FiberSpec spec;
    if (f.x1 > 0)
        spec.rows.push_back({f.x1, f.x2});
    else
        spec.rows.push_back({-f.x1, -f.x2});  // A(x) = A(-x)
    return detail2d::exact_union_measure(spec, f.half_width(), S);
}

// ---------------------------------------------------------------------------
// measure_mbar_2d: three strategies
// ---------------------------------------------------------------------------

inline MeasureEstimate measure_mbar_2d(long k, const Rat& eps, const Square& S,
                                       MeasureMethod strategy, long samples,
                                       std::uint64_t seed, unsigned threads_hint = 0) {
    if (k < 2) throw input_error("measure_mbar_2d: k must be >= 2");
    if (!S.inside_unit_square())
        throw input_error("measure_mbar_2d: S must lie inside the unit square");
    MeasureEstimate est;
    est.method = strategy;
    est.k = k;
    est.eps = eps;
    est.region = S;
    Rat tau = eps / Rat(Int(k) * Int(k));
    switch (strategy) {
        case MeasureMethod::exact_fiber_integration: {
            if (k > 10)
                throw resource_error(
                    "measure_mbar_2d: exact-fiber-integration supports k <= 10 only");
            est.value = detail2d::exact_union_measure(detail2d::FiberSpec::full(k), tau, S);
            est.ci_halfwidth = Rat(0);
            est.samples = 0;
            return est;
        }
        case MeasureMethod::fiber_mc: {
            if (samples < 1) throw input_error("measure_mbar_2d: need samples >= 1");
            RngStream rng(seed, 0x2D01);
            std::vector<Rat> partial(samples);
            detail2d::FiberSpec spec = detail2d::FiberSpec::full(k);
            Rat wlo = S.x_lo(), whi = S.x_hi();
            parallel_chunks(samples, threads_hint, [&](long b, long e) {
                for (long i = b; i < e; ++i) {
                    // 64-bit dyadic grid: keeps sweep keys in four limbs; the
                    // grid-vs-continuum bias of the piecewise-linear fiber
                    // length is ~2^-64, far below any CI in play
                    Rat beta = S.y_lo() + S.side * rng.uniform_rat(i, 64);
                    partial[i] = detail2d::fiber_union_length(spec, beta, tau, wlo, whi);
                }
            });
            Rat sum(0);
            for (const auto& p : partial) sum += p;
            est.value = S.side * sum / Rat(samples);
            // fiber lengths lie in [0, side]; estimate scale is side^2
            est.ci_halfwidth = S.side * S.side *
                               hoeffding_halfwidth(Rat(1), samples, Rat(1, 1000000));
            est.samples = samples;
            return est;
        }
        case MeasureMethod::point_mc: {
            if (samples < 1) throw input_error("measure_mbar_2d: need samples >= 1");
            RngStream rng(seed, 0x2D02);
            std::vector<long> hits_chunk(samples, 0);
            parallel_chunks(samples, threads_hint, [&](long b, long e) {
                for (long i = b; i < e; ++i) {
                    Rat alpha = S.x_lo() + S.side * rng.uniform_rat(2 * i, 128);
                    Rat beta = S.y_lo() + S.side * rng.uniform_rat(2 * i + 1, 128);
                    hits_chunk[i] = membership_mbar_2d(alpha, beta, k, eps) ? 1 : 0;
                }
            });
            long hits = 0;
            for (long h : hits_chunk) hits += h;
            est.value = S.area() * Rat(hits, samples);
            est.ci_halfwidth = S.area() * hoeffding_halfwidth(Rat(1), samples, Rat(1, 1000000));
            est.samples = samples;
            return est;
        }
    }
    throw input_error("measure_mbar_2d: unknown strategy");
}

// ---------------------------------------------------------------------------
// Lemma 1: lattice points of Lambda in a square
// ---------------------------------------------------------------------------

struct Lemma1Result {
    long count = 0;
    // bound = side^2 * delta + 2 side sqrt(x1^2+y1^2) + 2 side sqrt(x2^2+y2^2)
    Rat bound_rational_part;
    std::vector<std::pair<Rat, Int>> bound_sqrt_terms;
    bool ok = false;
};

/// Counts Lambda points in the closed square and checks the Jarnik-derived
/// bound.  Lambda = { v : t . v integer }, so the transform v -> t . v maps
/// it onto Z^2 and sends S to a parallelogram with area side^2 * delta and
/// edges side * (x1, y1), side * (x2, y2) -- the bound's terms.
/// Hypothesis x1, x2, y1, y2 > 1/side is enforced.
inline Lemma1Result lemma1_count_check(const CenterLattice& lat, const Square& S) {
    const Mat2& t = lat.t;
    Rat inv_side = S.side.inv();
    for (const Int* e : {&t.x1, &t.x2, &t.y1, &t.y2})
        if (!(Rat(*e) > inv_side))
            throw input_error("lemma1_count_check: entries must exceed 1/side");
    Int det = t.det();
    // lattice point v = t^{-1} (i, j); v in S gives linear constraints on j.
    // i = x1 v1 + x2 v2 ranges over the corner images.
    Rat xs[2] = {S.x_lo(), S.x_hi()};
    Rat ys[2] = {S.y_lo(), S.y_hi()};
    Rat imin, imax;
    bool first = true;
    for (const Rat& x : xs)
        for (const Rat& y : ys) {
            Rat i = x * Rat(t.x1) + y * Rat(t.x2);
            if (first) {
                imin = imax = i;
                first = false;
            } else {
                if (i < imin) imin = i;
                if (i > imax) imax = i;
            }
        }
    long count = 0;
    Rat rdet{det};
    Int itop = imax.floor();
    for (Int i = imin.ceil(); i <= itop; ++i) {
        // v1 = (i y2 - j x2)/det in [x_lo, x_hi]
        // v2 = (j x1 - i y1)/det in [y_lo, y_hi]
        // all entries positive, so only sign(det) flips directions
        Rat jlo, jhi;
        bool have = false;
        auto clamp = [&](const Rat& lo, const Rat& hi) {
            if (!have) {
                jlo = lo;
                jhi = hi;
                have = true;
            } else {
                if (lo > jlo) jlo = lo;
                if (hi < jhi) jhi = hi;
            }
        };
        {
            // x_lo <= (i y2 - j x2)/det <= x_hi, then divide by x2 > 0
            Rat a = Rat(i) * Rat(t.y2);
            Rat lo = a - S.x_hi() * rdet, hi = a - S.x_lo() * rdet;
            if (det < 0) std::swap(lo, hi);
            clamp(lo / Rat(t.x2), hi / Rat(t.x2));
        }
        {
            // y_lo <= (j x1 - i y1)/det <= y_hi, then divide by x1 > 0
            Rat a = Rat(i) * Rat(t.y1);
            Rat lo = S.y_lo() * rdet + a, hi = S.y_hi() * rdet + a;
            if (det < 0) std::swap(lo, hi);
            clamp(lo / Rat(t.x1), hi / Rat(t.x1));
        }
        if (have && jlo <= jhi) {
            Int lo = jlo.ceil(), hi = jhi.floor();
            if (hi >= lo) count += static_cast<long>(Int(hi - lo + 1).get_si());
        }
    }
    Lemma1Result r;
    r.count = count;
    r.bound_rational_part = S.side * S.side * Rat(lat.delta());
    Rat two_side = Rat(2) * S.side;
    r.bound_sqrt_terms = {{two_side, Int(t.x1 * t.x1 + t.y1 * t.y1)},
                          {two_side, Int(t.x2 * t.x2 + t.y2 * t.y2)}};
    // N < rational + sum sqrt terms  <=>  N - rational < sum
    r.ok = cmp_rat_vs_sqrt_sum(Rat(count) - r.bound_rational_part, r.bound_sqrt_terms) < 0;
    return r;
}

// ---------------------------------------------------------------------------
// Lemma 2: sum of 1/Delta over ordered pairs of distinct E_k elements
// ---------------------------------------------------------------------------

struct Lemma2Result {
    Rat sum;
    long pair_count = 0;
    bool bound_ok = false;  // sum <= 9 k^2 ln k
};

inline Lemma2Result lemma2_sum(long k) {
    if (k < 4) throw input_error("lemma2_sum: k must be >= 4");
    PrimitivePairSet ek = PrimitivePairSet::make_E(k);
    const auto& v = ek.pairs;
    // histogram over Delta (Delta <= k^2), exact sum over distinct values
    std::vector<long> counts(static_cast<std::size_t>(k) * k + 1, 0);
    long pair_count = 0;
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = a + 1; b < v.size(); ++b) {
            long d = v[a].first * v[b].second - v[a].second * v[b].first;
            if (d < 0) d = -d;
            // distinct primitive positive pairs are never parallel
            counts[static_cast<std::size_t>(d)] += 2;  // ordered pairs
            pair_count += 2;
        }
    }
    Rat sum(0);
    for (std::size_t d = 1; d < counts.size(); ++d)
        if (counts[d]) sum += Rat(counts[d], static_cast<long>(d));
    Lemma2Result r;
    r.sum = sum;
    r.pair_count = pair_count;
    Rat bound_coeff = Rat(9) * Rat(Int(k) * Int(k));
    Rat tol(1, 1000000);
    while (true) {
        RatInterval lnk = ln_bracket(Rat(k), tol);
        if (sum <= bound_coeff * lnk.lo) {
            r.bound_ok = true;
            break;
        }
        if (sum > bound_coeff * lnk.hi) {
            r.bound_ok = false;
            break;
        }
        tol /= 1024;
        if (tol < Rat(1, Int(1) << 100)) throw resource_error("lemma2_sum: ln refinement cap");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Lemma 3 / Lemma 4 bands
// ---------------------------------------------------------------------------

struct Lemma3Lemma4Report {
    MeasureEstimate estimate;
    Rat upper_band;              // 5 eps side^2
    RatInterval lower_band;      // side^2 (eps/(3 zeta2) - 37 eps^2 / zeta2^2)
    bool lower_band_positive = false;
    bool vacuous = false;        // lower band <= 0
    bool upper_ok = false;       // estimate - ci <= upper band
    bool lower_ok = false;       // estimate + ci >= lower band (hi end)
    Rat upper_margin;            // upper band - (estimate - ci)
    Rat lower_margin;            // (estimate + ci) - lower band hi
    Rat complement_value;        // side^2 - estimate  (Lemma 4 quantity)
    Rat lemma4_band;             // side^2 (1 - 5 eps)
    bool lemma4_ok = false;      // complement + ci >= lemma4 band
};

/// Tight certified bracket of the Lemma-3 lower band.
inline RatInterval lemma3_lower_band(const Rat& eps, const Rat& side) {
    Rat tol(1, 1 << 20);
    ZetaConst z = zeta(2, tol);
    RatInterval zeta2 = z.interval();
    Rat s2 = side * side;
    // decreasing in zeta for the first term, mixed for the second: use
    // directed ends per term.
    Rat lo = s2 * (eps / (Rat(3) * zeta2.hi) - Rat(37) * eps * eps / (zeta2.lo * zeta2.lo));
    Rat hi = s2 * (eps / (Rat(3) * zeta2.lo) - Rat(37) * eps * eps / (zeta2.hi * zeta2.hi));
    return {lo, hi};
}

inline Lemma3Lemma4Report lemma3_lemma4_band(const MeasureEstimate& estimate) {
    if (!estimate.region) throw input_error("lemma3_lemma4_band: estimate lacks a region");
    const Square& S = *estimate.region;
    const Rat& eps = estimate.eps;
    Lemma3Lemma4Report rep;
    rep.estimate = estimate;
    Rat s2 = S.side * S.side;
    rep.upper_band = Rat(5) * eps * s2;
    rep.lower_band = lemma3_lower_band(eps, S.side);
    rep.lower_band_positive = rep.lower_band.lo > Rat(0);
    rep.vacuous = rep.lower_band.hi <= Rat(0);
    Rat lo_est = estimate.value - estimate.ci_halfwidth;
    Rat hi_est = estimate.value + estimate.ci_halfwidth;
    rep.upper_ok = lo_est <= rep.upper_band;
    rep.upper_margin = rep.upper_band - lo_est;
    rep.lower_ok = rep.vacuous || hi_est >= rep.lower_band.hi;
    rep.lower_margin = hi_est - rep.lower_band.hi;
    rep.complement_value = s2 - estimate.value;
    rep.lemma4_band = s2 * (Rat(1) - Rat(5) * eps);
    rep.lemma4_ok = rep.complement_value + estimate.ci_halfwidth >= rep.lemma4_band;
    return rep;
}

}  // namespace oscil
