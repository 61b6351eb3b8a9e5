#pragma once

// Shared deterministic generators for the unit and acceptance suites.

#include <optional>
#include <vector>

#include "oscil/geom.hpp"
#include "oscil/rng.hpp"

namespace oscil::testgen {

/// Convex hull of a handful of random lattice points in [0, span]^2.
/// Returns nothing when the draw collapses (hull smaller than a triangle).
inline std::optional<ConvexPolygon> random_convex_lattice_polygon(
    const RngStream& rng, std::uint64_t trial, long span, long cloud = 12) {
    std::vector<IPoint> pts;
    pts.reserve(cloud);
    for (long j = 0; j < cloud; ++j) {
        pts.push_back({static_cast<long>(rng.below(trial * 64 + 2 * j, span + 1)),
                       static_cast<long>(rng.below(trial * 64 + 2 * j + 1, span + 1))});
    }
    auto hull = convex_hull(pts);
    if (hull.size() < 3) return std::nullopt;
    return ConvexPolygon::from_lattice(hull);
}

}  // namespace oscil::testgen
