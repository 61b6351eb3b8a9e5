#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "oscil/brackets.hpp"
#include "oscil/rat.hpp"

namespace oscil {

struct Vec2 {
    Rat x, y;
};

struct IPoint {
    long x = 0, y = 0;
    bool operator==(const IPoint&) const = default;
    bool operator<(const IPoint& o) const { return x != o.x ? x < o.x : y < o.y; }
};

inline Int cross(const IPoint& o, const IPoint& a, const IPoint& b) {
    return Int(a.x - o.x) * Int(b.y - o.y) - Int(a.y - o.y) * Int(b.x - o.x);
}

/// Convex hull (Andrew monotone chain), counterclockwise, collinear points
/// dropped.  Returns all distinct points if fewer than 3 span the hull.
inline std::vector<IPoint> convex_hull(std::vector<IPoint> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<IPoint> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    std::size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 0) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

/// Convex polygon with exact rational vertices, counterclockwise.
class ConvexPolygon {
  public:
    static ConvexPolygon from_ccw(std::vector<Vec2> vertices) {
        if (vertices.size() < 3) throw input_error("ConvexPolygon: need >= 3 vertices");
        ConvexPolygon p;
        p.v_ = std::move(vertices);
        if (!p.is_convex_ccw()) throw input_error("ConvexPolygon: vertices not convex ccw");
        return p;
    }

    static ConvexPolygon from_lattice(const std::vector<IPoint>& vertices) {
        std::vector<Vec2> v;
        v.reserve(vertices.size());
        for (const auto& p : vertices) v.push_back({Rat(p.x), Rat(p.y)});
        return from_ccw(std::move(v));
    }

    const std::vector<Vec2>& vertices() const { return v_; }

    Rat area() const {
        Rat twice(0);
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const Vec2& a = v_[i];
            const Vec2& b = v_[(i + 1) % v_.size()];
            twice += a.x * b.y - b.x * a.y;
        }
        return twice / Rat(2);
    }

    /// Perimeter as sum of c * sqrt(n) terms suitable for certified
    /// comparisons (edge (dx, dy) over common denominator d contributes
    /// sqrt(num_dx^2 + num_dy^2) / d).
    std::vector<std::pair<Rat, Int>> perimeter_terms() const {
        std::vector<std::pair<Rat, Int>> terms;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const Vec2& a = v_[i];
            const Vec2& b = v_[(i + 1) % v_.size()];
            Rat dx = b.x - a.x, dy = b.y - a.y;
            Int d = dx.den() * dy.den() / gcd(dx.den(), dy.den());
            Int nx = dx.num() * (d / dx.den());
            Int ny = dy.num() * (d / dy.den());
            terms.push_back({Rat(Int(1), d), Int(nx * nx + ny * ny)});
        }
        return terms;
    }

    /// Calls fn(y, x_first, x_last) for every integer row y meeting the
    /// closed polygon, where [x_first, x_last] are the integer x extents.
    template <typename Fn>
    void scan_rows(Fn&& fn) const {
        Rat ymin = v_[0].y, ymax = v_[0].y;
        for (const auto& p : v_) {
            if (p.y < ymin) ymin = p.y;
            if (p.y > ymax) ymax = p.y;
        }
        Int ytop = ymax.floor();
        for (Int y = ymin.ceil(); y <= ytop; ++y) {
            Rat yr{y};
            bool any = false;
            Rat xlo, xhi;
            for (std::size_t i = 0; i < v_.size(); ++i) {
                const Vec2& a = v_[i];
                const Vec2& b = v_[(i + 1) % v_.size()];
                if ((a.y < yr && b.y < yr) || (a.y > yr && b.y > yr)) continue;
                auto take = [&](const Rat& x) {
                    if (!any) {
                        xlo = xhi = x;
                        any = true;
                    } else {
                        if (x < xlo) xlo = x;
                        if (x > xhi) xhi = x;
                    }
                };
                if (a.y == yr) take(a.x);
                if (b.y == yr) take(b.x);
                if ((a.y < yr) != (b.y < yr) && a.y != yr && b.y != yr)
                    take(a.x + (b.x - a.x) * (yr - a.y) / (b.y - a.y));
            }
            if (any) {
                Int lo = xlo.ceil(), hi = xhi.floor();
                if (hi >= lo) fn(y, lo, hi);
            }
        }
    }

    /// Exact count of integer points in the closed polygon.
    long count_lattice_points() const {
        long count = 0;
        scan_rows([&](const Int&, const Int& lo, const Int& hi) {
            count += static_cast<long>(Int(hi - lo).get_si()) + 1;
        });
        return count;
    }

    std::vector<IPoint> lattice_points() const {
        std::vector<IPoint> out;
        scan_rows([&](const Int& y, const Int& lo, const Int& hi) {
            for (Int x = lo; x <= hi; ++x)
                out.push_back({static_cast<long>(x.get_si()), static_cast<long>(y.get_si())});
        });
        return out;
    }

  private:
    bool is_convex_ccw() const {
        std::size_t n = v_.size();
        bool any_positive = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = v_[i];
            const Vec2& b = v_[(i + 1) % n];
            const Vec2& c = v_[(i + 2) % n];
            Rat cr = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            if (cr.sign() < 0) return false;
            if (cr.sign() > 0) any_positive = true;
        }
        return any_positive;
    }

    std::vector<Vec2> v_;
};

/// Jarnik oracle: with N lattice points, area P and perimeter L >= 1 of a
/// convex plane region, P - L < N < L + P.  L is irrational in general;
/// both comparisons are decided through certified square-root brackets.
struct JarnikResult {
    long N = 0;
    Rat P;
    bool perimeter_at_least_one = false;
    bool ok = false;
};

inline JarnikResult jarnik_check(const ConvexPolygon& poly) {
    JarnikResult r;
    r.N = poly.count_lattice_points();
    r.P = poly.area();
    auto terms = poly.perimeter_terms();
    r.perimeter_at_least_one = cmp_rat_vs_sqrt_sum(Rat(1), terms) <= 0;
    // P - L < N  <=>  P - N < L;   N < L + P  <=>  N - P < L
    bool lower = cmp_rat_vs_sqrt_sum(r.P - Rat(r.N), terms) < 0;
    bool upper = cmp_rat_vs_sqrt_sum(Rat(r.N) - r.P, terms) < 0;
    r.ok = lower && upper;
    return r;
}

/// Pick-formula bound (convex region with >= 3 non-collinear lattice
/// points): N <= 2 * area + 2.
enum class PickStatus { ok, violated, hypothesis_not_met };

inline PickStatus pick_bound_check(const std::vector<IPoint>& points, const Rat& area) {
    if (points.size() < 3) return PickStatus::hypothesis_not_met;
    auto hull = convex_hull(points);
    if (hull.size() < 3) return PickStatus::hypothesis_not_met;  // collinear
    long N = static_cast<long>(points.size());
    return Rat(N) <= Rat(2) * area + Rat(2) ? PickStatus::ok : PickStatus::violated;
}

}  // namespace oscil
