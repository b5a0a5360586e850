#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rank1lab/errors.hpp"
#include "rank1lab/numeric.hpp"

namespace rank1lab {

// Strictly increasing integer vector with an optional certification radius.
//
// certified_bound == N means: the (possibly infinite) set this object stands
// for agrees with `elements` on [-N, N].  Elements with |x| > N may still be
// listed, but membership questions beyond N are unanswerable.  A set without a
// bound is exactly finite and authoritative everywhere.
class SortedIntSet {
public:
    SortedIntSet() = default;
    static SortedIntSet from_elements(std::vector<Integer> elems,
                                      std::optional<Integer> certified_bound = std::nullopt);

    const std::vector<Integer>& elements() const { return elems_; }
    const std::optional<Integer>& certified_bound() const { return bound_; }
    bool exactly_finite() const { return !bound_.has_value(); }

    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    Integer max_abs() const;  // 0 for the empty set

    // membership among stored elements; throws InsufficientTruncation when the
    // query point lies outside the certified window
    bool contains(const Integer& x) const;

    // smallest stored element in [lo, hi]; the window must sit inside the
    // certified range
    std::optional<Integer> first_in(const Integer& lo, const Integer& hi) const;

    bool operator==(const SortedIntSet& o) const { return elems_ == o.elems_; }

private:
    std::vector<Integer> elems_;
    std::optional<Integer> bound_;
};

// Pairwise sums / differences.  Certification of the result:
//   bound = min over inputs of (own bound - other's max |element|), clamped at 0,
// where an exactly finite input contributes no constraint.
SortedIntSet sumset(const SortedIntSet& a, const SortedIntSet& b);
SortedIntSet difference_set(const SortedIntSet& a, const SortedIntSet& b);

// { sum_i c_i * g_i : |c_i| <= bounds[i] }.  Generators must be positive,
// bounds nonnegative, lengths equal.  Result is exactly finite.
SortedIntSet signed_sums(const std::vector<Integer>& generators,
                         const std::vector<Integer>& bounds);

// Smallest l >= min_l such that for every k in multipliers the window
// [k*l - half_width, k*l + half_width] contains no element of s.  Every window
// must fit inside s's certified range; if no qualifying l exists with all
// windows certifiable, throws InsufficientTruncation.  s must carry a bound.
Integer find_gap_window(const SortedIntSet& s, const Integer& half_width,
                        const std::vector<Integer>& multipliers, const Integer& min_l);

// Iterated sumset G_1 + G_2 + ... + G_k held in factored form, supporting
// successor queries without materializing the sum.  Layers are small sorted
// sets (typically symmetric difference-generators of a tower stage); the
// element count of the sum grows multiplicatively but queries stay cheap via
// span pruning.
class LayeredSumset {
public:
    void push_layer(std::vector<Integer> layer);  // sorted ascending, nonempty
    std::size_t layer_count() const { return layers_.size(); }
    const Integer& min_element() const { return span_lo_; }
    const Integer& max_element() const { return span_hi_; }

    // smallest element >= x, if any
    std::optional<Integer> successor(const Integer& x) const;
    bool window_empty(const Integer& lo, const Integer& hi) const;
    bool contains(const Integer& x) const;

    // Smallest A in [lo, hi] with [A, A + width] empty of the sum, if any.
    // Answered from the cached list of maximal absent runs at this width, so
    // cost does not depend on how many elements the probe steps over.
    std::optional<Integer> first_clean_start(const Integer& lo, const Integer& hi,
                                             const Integer& width) const;

    // materializes the sum; intended for small layer counts (tests, facts)
    std::vector<Integer> materialize() const;

private:
    std::optional<Integer> succ_rec(std::size_t i, const Integer& x,
                                    const std::optional<Integer>& cutoff) const;
    void rebuild_runs(const Integer& width) const;

    std::vector<std::vector<Integer>> layers_;
    std::vector<Integer> prefix_lo_, prefix_hi_;  // span of G_1+...+G_i
    Integer span_lo_ = 0, span_hi_ = 0;

    // Maximal runs of absent integers inside the span admitting a window of
    // runs_width_; rebuilt lazily per width, dropped on push_layer.
    mutable bool runs_valid_ = false;
    mutable Integer runs_width_ = 0;
    mutable std::vector<std::pair<Integer, Integer>> runs_;
};

}  // namespace rank1lab
