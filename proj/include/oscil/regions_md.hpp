#pragma once

// Simultaneous regime (m >= 2, n = 1).  M_k-bar in [0,1]^m is the union
// over q <= k of cube clusters A(q) with half-width (eps/q) * k^(-1/m).
// The m-th root is irrational in general; every comparison against it is
// done by raising to the m-th power or through certified brackets, and
// per-axis measures live in Q + Q * k^(-1/m) with exact product expansion.

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "oscil/brackets.hpp"
#include "oscil/geom.hpp"
#include "oscil/parallel.hpp"
#include "oscil/psi.hpp"
#include "oscil/rng.hpp"
#include "oscil/stats.hpp"

namespace oscil {

// ---------------------------------------------------------------------------
// Q(u) values, u = k^(-1/m)
// ---------------------------------------------------------------------------

/// sign of r - s * k^(-1/m) for rational r, s with s >= 0, decided exactly
/// by m-th powers.
inline int cmp_rat_vs_root_multiple(const Rat& r, const Rat& s, long k, long m) {
    if (s.sign() < 0) throw input_error("cmp_rat_vs_root_multiple: s must be >= 0");
    if (s.is_zero()) return r.sign();
    if (r.sign() <= 0) return -1;  // s * u > 0
    // r vs s * k^(-1/m)  <=>  r^m * k vs s^m
    Rat lhs = r.pow(m) * Rat(Int(k));
    Rat rhs = s.pow(m);
    if (lhs == rhs) return 0;
    return lhs < rhs ? -1 : 1;
}

/// floor(x * k^(-1/m)) for rational x >= 0: the largest integer j with
/// j^m * k <= x^m.
inline Int floor_mul_root(const Rat& x, long k, long m) {
    if (x.sign() < 0) throw input_error("floor_mul_root: x must be >= 0");
    // j <= x / k^(1/m)  <=>  j^m <= x^m / k; both sides integers after floor
    Rat xm = x.pow(m) / Rat(Int(k));
    return iroot(xm.floor(), static_cast<unsigned long>(m)).first;
}

/// Element of Q(u), u = k^(-1/m), as coefficients over 1, u, ..., u^(m-1)
/// with the reduction u^m = 1/k.  When k is a perfect m-th power the value
/// collapses to a plain rational at construction.
class RootVal {
  public:
    RootVal(long k, long m) : k_(k), m_(m), c_(static_cast<std::size_t>(m), Rat(0)) {
        if (m < 2 || k < 1) throw input_error("RootVal: need m >= 2, k >= 1");
        auto [root, exact] = iroot(Int(k), static_cast<unsigned long>(m));
        if (exact) u_rat_ = Rat(1) / Rat(root);
    }
    static RootVal constant(long k, long m, const Rat& a) {
        RootVal v(k, m);
        v.c_[0] = a;
        return v;
    }
    /// a + b * u
    static RootVal linear(long k, long m, const Rat& a, const Rat& b) {
        RootVal v(k, m);
        if (v.u_rat_) {
            v.c_[0] = a + b * *v.u_rat_;
        } else {
            v.c_[0] = a;
            v.c_[1] = b;
        }
        return v;
    }

    long k() const { return k_; }
    long m() const { return m_; }

    RootVal operator+(const RootVal& o) const {
        check_same(o);
        RootVal r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }
    RootVal operator*(const RootVal& o) const {
        check_same(o);
        RootVal r(k_, m_);
        if (u_rat_) {
            r.c_[0] = c_[0] * o.c_[0];
            return r;
        }
        std::vector<Rat> prod(2 * c_.size() - 1, Rat(0));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j)
                prod[i + j] += c_[i] * o.c_[j];
        }
        Rat inv_k(1, static_cast<long>(k_));
        for (std::size_t d = 0; d < prod.size(); ++d)
            r.c_[d % m_] += d < static_cast<std::size_t>(m_) ? prod[d] : prod[d] * inv_k;
        return r;
    }

    bool is_rational() const {
        if (u_rat_) return true;
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (!c_[i].is_zero()) return false;
        return true;
    }
    Rat as_rat() const {
        if (!is_rational()) throw input_error("RootVal: value is irrational");
        return c_[0];
    }

    RatInterval bracket(unsigned long bits) const {
        if (is_rational()) return RatInterval::point(c_[0]);
        RatInterval u = root_bracket(Rat(1, static_cast<long>(k_)),
                                     static_cast<unsigned long>(m_), bits);
        RatInterval sum = RatInterval::point(c_[0]);
        RatInterval upow{Rat(1), Rat(1)};
        for (std::size_t i = 1; i < c_.size(); ++i) {
            upow = upow * u;
            sum = sum + upow * RatInterval::point(c_[i]);
        }
        return sum;
    }

    /// Certified sign of (*this - r).
    int cmp(const Rat& r) const {
        if (is_rational()) {
            Rat d = c_[0] - r;
            return d.sign();
        }
        for (unsigned long bits = 32; bits <= 1024; bits *= 2) {
            RatInterval b = bracket(bits);
            if (b.lo > r) return 1;
            if (b.hi < r) return -1;
        }
        throw resource_error("RootVal::cmp: refinement cap (value may equal r)");
    }

  private:
    void check_same(const RootVal& o) const {
        if (k_ != o.k_ || m_ != o.m_) throw input_error("RootVal: mixed extensions");
    }
    long k_, m_;
    std::optional<Rat> u_rat_;
    std::vector<Rat> c_;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Axis-aligned box in [0,1]^m.
struct BoxMd {
    std::vector<std::pair<Rat, Rat>> axes;

    explicit BoxMd(std::vector<std::pair<Rat, Rat>> a) : axes(std::move(a)) {
        for (const auto& [lo, hi] : axes)
            if (lo < Rat(0) || hi > Rat(1) || hi < lo)
                throw input_error("BoxMd: axes must satisfy 0 <= lo <= hi <= 1");
    }
    static BoxMd unit(long m) {
        return BoxMd(std::vector<std::pair<Rat, Rat>>(m, {Rat(0), Rat(1)}));
    }
    static BoxMd cube(long m, const Rat& corner, const Rat& side) {
        return BoxMd(std::vector<std::pair<Rat, Rat>>(m, {corner, corner + side}));
    }
    long dim() const { return static_cast<long>(axes.size()); }
    Rat volume() const {
        Rat v(1);
        for (const auto& [lo, hi] : axes) v *= hi - lo;
        return v;
    }
};

/// Cube cluster A(q): cubes of side 2 eps/(q k^(1/m)) centered at p/q.
struct CubeCluster {
    long q = 1, m = 2, k = 2;
    Rat eps;

    CubeCluster(long q_, long m_, const Rat& eps_, long k_) : q(q_), m(m_), k(k_), eps(eps_) {
        if (q < 1 || m < 2 || k < 2) throw input_error("CubeCluster: need q>=1, m>=2, k>=2");
        if (!(eps >= Rat(0))) throw input_error("CubeCluster: eps must be >= 0");
    }
    bool cubes_disjoint() const {
        // 2 eps < k^(1/m)  <=>  (2 eps)^m < k
        return (Rat(2) * eps).pow(m) < Rat(Int(k));
    }
};

/// The strip D = { |q2 p1 - q1 p2| <= a } with a = d * floor(eps(q1+q2) /
/// (d k^(1/m))), carrying lines l_c for c a multiple of d = gcd(q1, q2).
struct StripD {
    long q1, q2, d, k, m;
    Rat eps;
    Int a;

    StripD(long q1_, long q2_, long k_, long m_, const Rat& eps_)
        : q1(q1_), q2(q2_), k(k_), m(m_), eps(eps_) {
        if (!(1 <= q1 && q1 < q2)) throw input_error("StripD: need 1 <= q1 < q2");
        d = std::gcd(q1, q2);
        a = Int(d) * floor_mul_root(eps * Rat(q1 + q2) / Rat(d), k, m);
    }
    /// Number of integer-point-carrying lines in D.
    Int line_count() const { return 2 * (a / d) + 1; }
    bool collapsed_to_l0() const { return a == 0; }
    /// h^2 = 4 a^2 / (q1^2 + q2^2).
    Rat width_sq() const { return Rat(4 * a * a) / Rat(Int(q1) * q1 + Int(q2) * q2); }
};

/// Axis-aligned rectangle in the (p1, p2) plane.
struct RectC {
    Rat x_lo, x_hi, y_lo, y_hi;

    static RectC sized(long q1, long q2, const Rat& lam, const Rat& delta, const Rat& cx,
                       const Rat& cy) {
        Rat f = (Rat(1) + delta) * lam;
        return {cx, cx + f * Rat(q1), cy, cy + f * Rat(q2)};
    }
    /// C0 = [0, (1+delta) lam q1 / 2] x [0, (1+delta) lam q2 / 2].
    static RectC c0(long q1, long q2, const Rat& lam, const Rat& delta) {
        Rat f = (Rat(1) + delta) * lam / Rat(2);
        return {Rat(0), f * Rat(q1), Rat(0), f * Rat(q2)};
    }
};

// ---------------------------------------------------------------------------
// Membership and measures
// ---------------------------------------------------------------------------

/// alphas in M_k-bar  <=>  exists q <= k with max_i ||q alpha_i|| <=
/// eps * k^(-1/m).  Exact: on the dyadic path the threshold is
/// floor(eps k^(-1/m) 2^128), an integer m-th root computed once.
inline bool membership_mbar_md(const std::vector<Rat>& alphas, long k, const Rat& eps,
                               long* witness_q = nullptr) {
    long m = static_cast<long>(alphas.size());
    if (m < 2) throw input_error("membership_mbar_md: need m >= 2");
    if (k < 2) throw input_error("membership_mbar_md: k must be >= 2");
    if (eps.sign() < 0) throw input_error("membership_mbar_md: eps must be >= 0");
    MatrixTheta theta = MatrixTheta::column(alphas);
    auto dy = detail::DyadicTheta::from(theta);
    if (dy) {
        // thr = floor(eps * 2^128 / k^(1/m)): largest j with j^m k ed^m <= (en 2^128)^m
        Int en_scaled = eps.num() << 128;
        Rat x(en_scaled, eps.den());
        Int thr_int = floor_mul_root(x, k, m);
        Int cap = (Int(1) << 128) - 1;
        if (thr_int > cap) thr_int = cap;
        u128 thr = u128_from_int(thr_int);
        std::vector<u128> v(m, 0);
        for (long q = 1; q <= k; ++q) {
            u128 dmax = 0;
            for (long i = 0; i < m; ++i) {
                v[i] += dy->scaled[i];
                u128 di = detail::torus_distance(v[i]);
                if (di > dmax) dmax = di;
            }
            if (dmax <= thr) {
                if (witness_q) *witness_q = q;
                return true;
            }
        }
        return false;
    }
    for (long q = 1; q <= k; ++q) {
        Rat dmax(0);
        for (long i = 0; i < m; ++i) {
            Rat di = nearest_int_distance(alphas[i] * Rat(q));
            if (di > dmax) dmax = di;
        }
        // dmax <= eps * k^(-1/m)
        if (cmp_rat_vs_root_multiple(dmax, eps, k, m) <= 0) {
            if (witness_q) *witness_q = q;
            return true;
        }
    }
    return false;
}

/// Exact measure of A(q) cap box as an element of Q(k^(-1/m)): per-axis
/// interval unions (disjoint cubes required) multiplied out.
inline RootVal cube_cluster_measure(const CubeCluster& c, const BoxMd& box) {
    if (box.dim() != c.m) throw input_error("cube_cluster_measure: box dimension mismatch");
    if (!c.cubes_disjoint())
        throw input_error("cube_cluster_measure: overlap regime 2 eps >= k^(1/m) unsupported");
    Rat h_coeff = c.eps / Rat(c.q);  // half-width = h_coeff * u
    RootVal total = RootVal::constant(c.k, c.m, Rat(1));
    for (const auto& [blo, bhi] : box.axes) {
        // sum over centers p/q of |[p/q - h, p/q + h] cap [blo, bhi]|
        Rat a_sum(0), b_sum(0);  // axis length = a_sum + b_sum * u
        Int plo = (blo * Rat(c.q)).floor() - 1;
        Int phi = (bhi * Rat(c.q)).ceil() + 1;
        if (plo < 0) plo = 0;
        if (phi > c.q) phi = c.q;
        for (Int p = plo; p <= phi; ++p) {
            Rat center = Rat(p, Int(c.q));
            // clipped length max(0, min(c+h, bhi) - max(c-h, blo))
            int left_clip = cmp_rat_vs_root_multiple(center - blo, h_coeff, c.k, c.m);
            int right_clip = cmp_rat_vs_root_multiple(bhi - center, h_coeff, c.k, c.m);
            if (left_clip >= 0 && right_clip >= 0) {
                b_sum += Rat(2) * h_coeff;  // fully inside
            } else if (left_clip < 0 && right_clip >= 0) {
                // [blo, center + h]; empty iff center + h < blo
                if (cmp_rat_vs_root_multiple(blo - center, h_coeff, c.k, c.m) < 0) {
                    a_sum += center - blo;
                    b_sum += h_coeff;
                }
            } else if (left_clip >= 0 && right_clip < 0) {
                if (cmp_rat_vs_root_multiple(center - bhi, h_coeff, c.k, c.m) < 0) {
                    a_sum += bhi - center;
                    b_sum += h_coeff;
                }
            } else {
                // both ends clip: the cube swallows the whole axis interval
                a_sum += bhi - blo;
            }
        }
        total = total * RootVal::linear(c.k, c.m, a_sum, b_sum);
    }
    return total;
}

/// The Lemma-5 proof bound mu(S cap A(q)) <= (lam q + 2)^m (2 eps)^m/(k q^m)
/// checked exactly for a cube of side lam.
inline bool cube_cluster_bound_ok(const CubeCluster& c, const Rat& lam, const Rat& corner) {
    BoxMd box = BoxMd::cube(c.m, corner, lam);
    RootVal mu = cube_cluster_measure(c, box);
    Rat bound = (lam * Rat(c.q) + Rat(2)).pow(c.m) * (Rat(2) * c.eps).pow(c.m) /
                (Rat(Int(c.k)) * Rat(c.q).pow(c.m));
    return mu.cmp(bound) <= 0;
}

/// Estimate with provenance for the md regime.
struct MdEstimate {
    Rat value;
    Rat ci_halfwidth;
    long samples = 0;
    long k = 0, m = 0;
    Rat eps;
    std::optional<BoxMd> box;
};

/// Bernoulli Monte-Carlo estimate of mu(box cap M_k-bar).
inline MdEstimate measure_mbar_md(long k, const Rat& eps, long m, const BoxMd& box,
                                  long samples, std::uint64_t seed,
                                  unsigned threads_hint = 0) {
    if (samples < 1) throw input_error("measure_mbar_md: need samples >= 1");
    if (box.dim() != m) throw input_error("measure_mbar_md: box dimension mismatch");
    RngStream rng(seed, 0x3D01);
    std::vector<unsigned char> hit(samples, 0);
    bool unit_box = box.volume() == Rat(1);
    parallel_chunks(samples, threads_hint, [&](long b, long e) {
        std::vector<Rat> alphas(m);
        for (long i = b; i < e; ++i) {
            for (long j = 0; j < m; ++j) {
                Rat u = rng.uniform_rat(static_cast<std::uint64_t>(i) * m + j, 128);
                const auto& [lo, hi] = box.axes[j];
                alphas[j] = unit_box ? u : lo + (hi - lo) * u;
            }
            hit[i] = membership_mbar_md(alphas, k, eps) ? 1 : 0;
        }
    });
    long hits = 0;
    for (unsigned char h : hit) hits += h;
    MdEstimate est;
    est.value = box.volume() * Rat(hits, samples);
    est.ci_halfwidth = box.volume() * hoeffding_halfwidth(Rat(1), samples, Rat(1, 1000000));
    est.samples = samples;
    est.k = k;
    est.m = m;
    est.eps = eps;
    est.box = box;
    return est;
}

// ---------------------------------------------------------------------------
// Lemma 5 / Lemma 14 bands
// ---------------------------------------------------------------------------

struct Lemma5Lemma14Report {
    MdEstimate estimate;
    Rat lemma5_complement_band;  // 2 (4 lam eps)^m, upper bound on the estimate
    Rat lemma14_band;            // (2 lam eps)^m / 6 - (68 lam eps^2)^m / 4
    bool lemma14_vacuous = false;
    bool lemma5_ok = false;   // estimate - ci <= complement band
    bool lemma14_ok = false;  // estimate + ci >= band (or vacuous)
    Rat lemma5_margin;
    Rat lemma14_margin;
    Rat complement_value;  // lam^m - estimate, the Lemma-5 lower bound side
};

inline Lemma5Lemma14Report lemma5_lemma14_check(const MdEstimate& est, const Rat& lam) {
    Lemma5Lemma14Report rep;
    rep.estimate = est;
    long m = est.m;
    rep.lemma5_complement_band = Rat(2) * (Rat(4) * lam * est.eps).pow(m);
    rep.lemma14_band = (Rat(2) * lam * est.eps).pow(m) / Rat(6) -
                       (Rat(68) * lam * est.eps * est.eps).pow(m) / Rat(4);
    rep.lemma14_vacuous = rep.lemma14_band.sign() <= 0;
    Rat lo = est.value - est.ci_halfwidth, hi = est.value + est.ci_halfwidth;
    rep.lemma5_ok = lo <= rep.lemma5_complement_band;
    rep.lemma5_margin = rep.lemma5_complement_band - lo;
    rep.lemma14_ok = rep.lemma14_vacuous || hi >= rep.lemma14_band;
    rep.lemma14_margin = hi - rep.lemma14_band;
    rep.complement_value = lam.pow(m) - est.value;
    return rep;
}

// ---------------------------------------------------------------------------
// Lemma 6 and the totient series
// ---------------------------------------------------------------------------

struct Lemma6Result {
    Rat sum;
    long pair_count = 0;
    bool ok = false;  // sum <= 2k/5
};

/// Exact sum of gcd(q1,q2)^m / q2^m over ceil(k/2) <= q1 < q2 <= k.
inline Lemma6Result lemma6_sum(long k, long m) {
    if (m < 2) throw input_error("lemma6_sum: m must be >= 2");
    if (k < 4) throw input_error("lemma6_sum: k must be >= 4");
    Lemma6Result r;
    r.sum = Rat(0);
    long lo = (k + 1) / 2;
    for (long q2 = lo + 1; q2 <= k; ++q2) {
        Int inner(0);
        for (long q1 = lo; q1 < q2; ++q1) {
            Int g(std::gcd(q1, q2));
            Int gm;
            mpz_pow_ui(gm.get_mpz_t(), g.get_mpz_t(), static_cast<unsigned long>(m));
            inner += gm;
            ++r.pair_count;
        }
        r.sum += Rat(inner) / Rat(Int(q2)).pow(m);
    }
    r.ok = r.sum <= Rat(2 * k, 5);
    return r;
}

struct TotientSeriesResult {
    Rat partial;            // sum over p <= P of phi(p)/p^m
    RatInterval target;     // zeta(m-1)/zeta(m)
    Rat tail_bound;         // bound on the dropped remainder
    bool ok = false;        // partial in [target.lo - tail, target.hi]
};

/// Partial Dirichlet series of phi against the zeta-ratio limit.
inline TotientSeriesResult totient_series_check(long m, long P) {
    if (m < 3) throw input_error("totient_series_check: m must be >= 3");
    if (P < 10) throw input_error("totient_series_check: P must be >= 10");
    if (P > 1000000)
        throw resource_error("totient_series_check: totient sieve capped at 10^6");
    std::vector<long> phi(P + 1);
    for (long i = 0; i <= P; ++i) phi[i] = i;
    for (long p = 2; p <= P; ++p) {
        if (phi[p] == p) {  // p prime
            for (long j = p; j <= P; j += p) phi[j] -= phi[j] / p;
        }
    }
    TotientSeriesResult r;
    r.partial = Rat(0);
    for (long p = 1; p <= P; ++p) r.partial += Rat(Int(phi[p])) / Rat(Int(p)).pow(m);
    Rat tol(1, 1000000);
    ZetaConst znum = zeta(m - 1, tol), zden = zeta(m, tol);
    r.target = {znum.lo / zden.hi, znum.hi / zden.lo};
    // remainder <= sum_{p > P} p^(1-m) <= P^(2-m)/(m-2)
    r.tail_bound = Rat(1) / (Rat(Int(P)).pow(m - 2) * Rat(m - 2));
    r.ok = r.partial >= r.target.lo - r.tail_bound && r.partial <= r.target.hi;
    return r;
}

// ---------------------------------------------------------------------------
// D-strip point enumeration
// ---------------------------------------------------------------------------

/// Integer points of D cap rect, walking the lines l_c (c a multiple of d,
/// |c| <= a): on each line the points form an arithmetic progression with
/// step (q1/d, q2/d).  Never scans the rectangle.
inline std::vector<IPoint> d_region_points(const StripD& strip, const RectC& rect) {
    std::vector<IPoint> out;
    long q1 = strip.q1, q2 = strip.q2, d = strip.d;
    long s1 = q1 / d, s2 = q2 / d;  // direction of every line
    // one solution of q2 e - q1 f = d via the extended Euclid on (q2, q1)
    long e0, f0;
    {
        long old_r = q2, r = q1, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            long quot = old_r / r;
            std::tie(old_r, r) = std::pair<long, long>(r, old_r - quot * r);
            std::tie(old_s, s) = std::pair<long, long>(s, old_s - quot * s);
            std::tie(old_t, t) = std::pair<long, long>(t, old_t - quot * t);
        }
        // old_s q2 + old_t q1 = d
        e0 = old_s;
        f0 = -old_t;
    }
    long long amax = static_cast<long long>(strip.a.get_si());
    for (long long c = -amax; c <= amax; c += d) {
        long long mult = c / d;
        // base point (e0, f0) * (c/d) satisfies q2 x - q1 y = c
        long long bx = e0 * mult, by = f0 * mult;
        // t-range from rect: x_lo <= bx + t s1 <= x_hi, y_lo <= by + t s2 <= y_hi
        Rat bxr{static_cast<long>(bx)}, byr{static_cast<long>(by)};
        Rat tlo = (rect.x_lo - bxr) / Rat(s1);
        Rat thi = (rect.x_hi - bxr) / Rat(s1);
        Rat tlo2 = (rect.y_lo - byr) / Rat(s2);
        Rat thi2 = (rect.y_hi - byr) / Rat(s2);
        if (tlo2 > tlo) tlo = tlo2;
        if (thi2 < thi) thi = thi2;
        if (thi < tlo) continue;
        Int t0 = tlo.ceil(), t1 = thi.floor();
        for (Int t = t0; t <= t1; ++t) {
            long long tv = t.get_si();
            out.push_back({static_cast<long>(bx + tv * s1), static_cast<long>(by + tv * s2)});
        }
        if (out.size() > 100'000'000) throw resource_error("d_region_points: point budget");
    }
    return out;
}

/// Lemma 11 right side raised to the m-th power (rational), so that the
/// count bound is count^m <= this.
inline Rat lemma11_bound_pow_m(const StripD& strip, const Rat& lam) {
    long m = strip.m;
    Rat km1 = Rat(Int(strip.k)).pow(m - 1);  // (k^(1-1/m))^m
    Rat t1 = (Rat(32) * strip.eps * lam).pow(m) * km1;
    Rat t2 = (Rat(16) * strip.eps / Rat(strip.d)).pow(m) * km1;
    Rat t3 = (Rat(8) * lam * Rat(strip.d)).pow(m);
    Rat t4 = Rat(4).pow(m);
    return t1 + t2 + t3 + t4;
}

// ---------------------------------------------------------------------------
// Pair classification over Tr_k
// ---------------------------------------------------------------------------

struct PairClass {
    long q1 = 0, q2 = 0, d = 1;
    long count0 = 0;  // #(D cap C0 cap Z^2)
    bool in_j0 = false, in_j1 = false, in_v = false;
    bool collinear = true;
    bool gamma_ok = true;    // step gamma <= k^(1/m)/(4 eps)
    bool sine_ok = true;     // sin omega <= 1/(2 k lam gamma)
    bool lemma11_ok = true;  // count(D cap C cap Z^2) bound
};

struct ClassifyReport {
    long k = 0, m = 0;
    Rat eps, lam, delta;
    bool meaningful_regime = false;  // (1+delta) eps lam k^(1-1/m) > 6
    long total_pairs = 0;
    long j0_count = 0, j1_count = 0, v_count = 0;
    long violations_j0_subset_j1 = 0;
    long violations_j1_subset_v = 0;
    long violations_collinear = 0;
    long violations_gamma = 0;
    long violations_sine = 0;
    long violations_lemma11 = 0;
    bool lemma13_ok_j1 = false, lemma13_ok_v = false;
    bool lemma13_trivial = false;  // bound >= |Tr_k|
    Rat lemma13_bound_pow;         // bound^(2m), compare against counts^(2m)
    std::vector<PairClass> offenders;  // first few violating pairs
};

/// Primitive directions Pr_k: (p1, p2) in [1, k^(1/m)/(4 eps)]^2, coprime,
/// 1 <= p2/p1 <= 2.
inline std::vector<std::pair<long, long>> pr_k_pairs(long k, long m, const Rat& eps) {
    // floor(k^(1/m)/(4 eps)): largest j with j^m (4 eps)^m <= k
    Rat bound_pow = Rat(Int(k)) / (Rat(4) * eps).pow(m);
    Int pmax = iroot(bound_pow.floor(), static_cast<unsigned long>(m)).first;
    long pm = static_cast<long>(pmax.get_si());
    std::vector<std::pair<long, long>> out;
    for (long p1 = 1; p1 <= pm; ++p1)
        for (long p2 = p1; p2 <= std::min(2 * p1, pm); ++p2)
            if (std::gcd(p1, p2) == 1) out.push_back({p1, p2});
    return out;
}

namespace detailmd {

/// Exact sector test: is the direction (q1, q2) within half-angle phi/2 of
/// (p1, p2), where sin(phi) = 1/(k lam gamma), gamma = |(p1,p2)|?
/// With g = p1^2+p2^2, Q = q1^2+q2^2, cr = |q1 p2 - q2 p1| and
/// a^2 = 1/(k lam)^2 the condition sin(theta) <= sin(phi/2) becomes
///   (g - a^2) Q^2 g <= (Q g - 2 cr^2)^2   and   Q g >= 2 cr^2,
/// all rational.
inline bool sector_contains(long q1, long q2, long p1, long p2, long k, const Rat& lam) {
    Int Q = Int(q1) * q1 + Int(q2) * q2;
    Int g = Int(p1) * p1 + Int(p2) * p2;
    Int cr = Int(q1) * p2 - Int(q2) * p1;
    if (cr < 0) cr = -cr;
    // screen: sin(theta) <= sin(phi) <=> cr^2 k^2 lam^2 <= Q
    Rat k2l2 = Rat(Int(k) * k) * lam * lam;
    Rat cr2{cr * cr};
    if (cr2 * k2l2 > Rat(Q)) return false;
    Rat a2 = k2l2.inv();
    if (Rat(g) <= a2) return true;  // sector spans everything
    Rat lhs = (Rat(g) - a2) * Rat(Q * Q) * Rat(g);
    Rat base = Rat(Q * g) - Rat(2) * cr2;
    if (base.sign() < 0) return false;
    return lhs <= base * base;
}

}  // namespace detailmd

/// Classifies pairs of Tr_k = { ceil(k/2) <= q1 < q2 <= k }: J0 (high gcd),
/// J1 (many points in D cap C0), V (sector membership), plus the
/// per-pair collinearity / step / angle checks and the Lemma 11 and 13
/// count bounds.  mode_samples = 0 means full enumeration.
inline ClassifyReport classify_pairs(long k, long m, const Rat& eps, const Rat& lam,
                                     const Rat& delta, long mode_samples = 0,
                                     std::uint64_t seed = 0, unsigned threads_hint = 0) {
    if (m < 2 || k < 4) throw input_error("classify_pairs: need m >= 2, k >= 4");
    ClassifyReport rep;
    rep.k = k;
    rep.m = m;
    rep.eps = eps;
    rep.lam = lam;
    rep.delta = delta;
    // (1+delta) eps lam k^(1-1/m) > 6  <=>  ((1+delta) eps lam)^m k^(m-1) > 6^m
    rep.meaningful_regime =
        ((Rat(1) + delta) * eps * lam).pow(m) * Rat(Int(k)).pow(m - 1) > Rat(6).pow(m);

    long lo = (k + 1) / 2;
    std::vector<std::pair<long, long>> pairs;
    for (long q1 = lo; q1 <= k; ++q1)
        for (long q2 = q1 + 1; q2 <= k; ++q2) pairs.push_back({q1, q2});
    if (mode_samples > 0 && mode_samples < static_cast<long>(pairs.size())) {
        RngStream rng(seed, 0x3D02);
        std::vector<std::pair<long, long>> picked;
        picked.reserve(mode_samples);
        for (long i = 0; i < mode_samples; ++i)
            picked.push_back(pairs[rng.below(i, pairs.size())]);
        pairs = std::move(picked);
    }
    rep.total_pairs = static_cast<long>(pairs.size());

    auto prk = pr_k_pairs(k, m, eps);
    // thresholds as exact comparisons
    Rat nine_eps_pow = Rat(9).pow(m) * eps.pow(m) * Rat(Int(k)).pow(m - 1);  // (9 eps k^(1-1/m))^m
    Rat n0_minus6_pow = (Rat(8) * (Rat(1) + delta) * eps * lam).pow(m) *
                        Rat(Int(k)).pow(m - 1);  // (N0 - 6)^m
    Rat gamma_cap_pow = Rat(Int(k)).pow(2);      // (k^(1/m)/(4 eps))^(2m) * (16 eps^2)^m = k^2

    long n = rep.total_pairs;
    std::vector<PairClass> rows(n);
    parallel_chunks(n, threads_hint, [&](long b, long e) {
        for (long idx = b; idx < e; ++idx) {
            auto [q1, q2] = pairs[idx];
            PairClass& pc = rows[idx];
            pc.q1 = q1;
            pc.q2 = q2;
            pc.d = std::gcd(q1, q2);
            // J0: d > 9 eps k^(1-1/m)
            pc.in_j0 = Rat(pc.d).pow(m) > nine_eps_pow;
            StripD strip(q1, q2, k, m, eps);
            RectC c0 = RectC::c0(q1, q2, lam, delta);
            auto pts = d_region_points(strip, c0);
            pc.count0 = static_cast<long>(pts.size());
            // J1: count0 >= N0/2 <=> 2 count0 - 6 >= 8(1+d) eps lam k^(1-1/m)
            Rat lhs(2 * pc.count0 - 6);
            pc.in_j1 = lhs.sign() >= 0 && lhs.pow(m) >= n0_minus6_pow;
            // V membership
            pc.in_v = false;
            for (const auto& [p1, p2] : prk) {
                if (detailmd::sector_contains(q1, q2, p1, p2, k, lam)) {
                    pc.in_v = true;
                    break;
                }
            }
            // collinearity, step and angle for J1 pairs
            if (pc.in_j1 && pts.size() >= 2) {
                std::sort(pts.begin(), pts.end());
                long vx = pts[1].x - pts[0].x, vy = pts[1].y - pts[0].y;
                for (std::size_t i = 2; i < pts.size(); ++i) {
                    long ex = pts[i].x - pts[i - 1].x, ey = pts[i].y - pts[i - 1].y;
                    if (Int(vx) * ey - Int(vy) * ex != 0 || ex != vx || ey != vy) {
                        pc.collinear = false;
                        break;
                    }
                }
                if (pc.collinear) {
                    Rat gamma_sq{Int(vx) * vx + Int(vy) * vy};
                    // gamma <= k^(1/m)/(4 eps) <=> (16 eps^2 gamma^2)^m <= k^2
                    pc.gamma_ok = (Rat(16) * eps * eps * gamma_sq).pow(m) <= gamma_cap_pow;
                    // sin omega <= 1/(2 k lam gamma) <=> 4 k^2 lam^2 cross^2 <= Q
                    Int crossv = Int(vx) * q2 - Int(vy) * q1;
                    Rat q_norm{Int(q1) * q1 + Int(q2) * q2};
                    pc.sine_ok =
                        Rat(4) * Rat(Int(k) * k) * lam * lam * Rat(crossv * crossv) <= q_norm;
                }
            }
            // Lemma 11 on an arbitrary-position C (deterministic offset)
            RectC c_full = RectC::sized(q1, q2, lam, delta, -lam * Rat(q1) / Rat(3),
                                        -lam * Rat(q2) / Rat(5));
            long count_c = static_cast<long>(d_region_points(strip, c_full).size());
            pc.lemma11_ok = Rat(count_c).pow(m) <= lemma11_bound_pow_m(strip, lam);
        }
    });

    for (const auto& pc : rows) {
        if (pc.in_j0) ++rep.j0_count;
        if (pc.in_j1) ++rep.j1_count;
        if (pc.in_v) ++rep.v_count;
        bool offend = false;
        if (pc.in_j0 && !pc.in_j1) {
            ++rep.violations_j0_subset_j1;
            offend = true;
        }
        if (pc.in_j1 && !pc.in_v) {
            ++rep.violations_j1_subset_v;
            offend = true;
        }
        if (pc.in_j1 && !pc.collinear) {
            ++rep.violations_collinear;
            offend = true;
        }
        if (pc.in_j1 && !pc.gamma_ok) {
            ++rep.violations_gamma;
            offend = true;
        }
        if (pc.in_j1 && !pc.sine_ok) {
            ++rep.violations_sine;
            offend = true;
        }
        if (!pc.lemma11_ok) {
            ++rep.violations_lemma11;
            offend = true;
        }
        if (offend && rep.offenders.size() < 32) rep.offenders.push_back(pc);
    }
    // Lemma 13: count <= 2 k^(1+3/(2m)) / (lam eps^2), compared at power 2m
    Rat bound_pow = Rat(2).pow(2 * m) * Rat(Int(k)).pow(2 * m + 3) /
                    (lam * eps * eps).pow(2 * m);
    rep.lemma13_bound_pow = bound_pow;
    rep.lemma13_ok_j1 = Rat(rep.j1_count).pow(2 * m) <= bound_pow;
    long v_in_tr = rep.v_count;
    rep.lemma13_ok_v = Rat(v_in_tr).pow(2 * m) <= bound_pow;
    rep.lemma13_trivial = Rat(rep.total_pairs).pow(2 * m) <= bound_pow;
    return rep;
}

}  // namespace oscil
