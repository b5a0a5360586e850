#pragma once

#include <utility>
#include <vector>

#include "rank1lab/numeric.hpp"

namespace rank1lab {

// Finite unions of half-open intervals [a, b) with exact rational endpoints.
// Kept canonical: sorted, pairwise disjoint, never touching, never empty
// pieces.  Canonical form makes equality a plain vector compare.
class IntervalSet {
public:
    using Interval = std::pair<Rational, Rational>;

    IntervalSet() = default;
    // validates a <= b for every piece, drops empty ones, merges the rest
    static IntervalSet from_intervals(std::vector<Interval> ivs);
    static IntervalSet interval(const Rational& a, const Rational& b);

    const std::vector<Interval>& intervals() const { return ivs_; }
    bool empty() const { return ivs_.empty(); }
    std::size_t piece_count() const { return ivs_.size(); }
    Rational measure() const;
    bool contains_point(const Rational& x) const;
    const Rational& min() const;  // leftmost endpoint, invalid on empty
    const Rational& max() const;  // rightmost endpoint (not attained)

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet subtract(const IntervalSet& o) const;
    IntervalSet translate(const Rational& dx) const;

    bool operator==(const IntervalSet& o) const { return ivs_ == o.ivs_; }

private:
    std::vector<Interval> ivs_;
};

}  // namespace rank1lab
