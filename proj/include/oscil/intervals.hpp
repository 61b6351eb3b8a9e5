#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "oscil/rat.hpp"

namespace oscil {

/// Sorted union of pairwise disjoint closed intervals [lo, hi].
/// Canonical form merges intervals that overlap or touch at an endpoint
/// (closed intervals, matching the non-strict inequalities of the sets
/// this type represents).
class IntervalSet {
  public:
    struct Interval {
        Rat lo, hi;
    };

    IntervalSet() = default;

    /// Canonicalizes an arbitrary collection of [lo, hi] pairs.
    explicit IntervalSet(std::vector<Interval> raw) {
        for (const auto& iv : raw)
            if (iv.hi < iv.lo) throw input_error("IntervalSet: interval with lo > hi");
        std::sort(raw.begin(), raw.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (auto& iv : raw) {
            if (!ivs_.empty() && iv.lo <= ivs_.back().hi) {
                if (ivs_.back().hi < iv.hi) ivs_.back().hi = iv.hi;
            } else {
                ivs_.push_back(iv);
            }
        }
    }

    const std::vector<Interval>& intervals() const { return ivs_; }
    bool empty() const { return ivs_.empty(); }
    std::size_t size() const { return ivs_.size(); }

    Rat total_length() const {
        Rat s(0);
        for (const auto& iv : ivs_) s += iv.hi - iv.lo;
        return s;
    }

    bool contains(const Rat& x) const {
        auto it = std::upper_bound(ivs_.begin(), ivs_.end(), x,
                                   [](const Rat& v, const Interval& iv) { return v < iv.lo; });
        if (it == ivs_.begin()) return false;
        --it;
        return x <= it->hi;
    }

    IntervalSet intersect(const Rat& lo, const Rat& hi) const {
        std::vector<Interval> out;
        for (const auto& iv : ivs_) {
            Rat a = max(iv.lo, lo), b = min(iv.hi, hi);
            if (a <= b) out.push_back({a, b});
        }
        IntervalSet r;
        r.ivs_ = std::move(out);  // already canonical
        return r;
    }

  private:
    std::vector<Interval> ivs_;
};

/// Canonical merged set plus its exact total length.
inline std::pair<IntervalSet, Rat> interval_union_length(
    std::vector<IntervalSet::Interval> raw) {
    IntervalSet s(std::move(raw));
    Rat len = s.total_length();
    return {std::move(s), std::move(len)};
}

}  // namespace oscil
