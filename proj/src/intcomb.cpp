#include "rank1lab/intcomb.hpp"

#include <algorithm>
#include <stdexcept>

namespace rank1lab {

SortedIntSet SortedIntSet::from_elements(std::vector<Integer> elems,
                                         std::optional<Integer> certified_bound) {
    if (certified_bound && *certified_bound < 0)
        throw std::invalid_argument("certified_bound must be nonnegative");
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    SortedIntSet s;
    s.elems_ = std::move(elems);
    s.bound_ = std::move(certified_bound);
    return s;
}

Integer SortedIntSet::max_abs() const {
    if (elems_.empty()) return 0;
    return std::max(int_abs(elems_.front()), int_abs(elems_.back()));
}

bool SortedIntSet::contains(const Integer& x) const {
    if (bound_ && int_abs(x) > *bound_)
        throw InsufficientTruncation("membership query at " + to_string(x) +
                                     " beyond certified bound " + to_string(*bound_));
    return std::binary_search(elems_.begin(), elems_.end(), x);
}

std::optional<Integer> SortedIntSet::first_in(const Integer& lo, const Integer& hi) const {
    if (lo > hi) return std::nullopt;
    if (bound_ && (int_abs(lo) > *bound_ || int_abs(hi) > *bound_))
        throw InsufficientTruncation("window [" + to_string(lo) + "," + to_string(hi) +
                                     "] beyond certified bound " + to_string(*bound_));
    auto it = std::lower_bound(elems_.begin(), elems_.end(), lo);
    if (it == elems_.end() || *it > hi) return std::nullopt;
    return *it;
}

namespace {

// bound = min over inputs of (own bound - other's max |element|), clamped at 0
std::optional<Integer> pair_bound(const SortedIntSet& a, const SortedIntSet& b) {
    std::optional<Integer> r;
    if (a.certified_bound()) r = *a.certified_bound() - b.max_abs();
    if (b.certified_bound()) {
        Integer c = *b.certified_bound() - a.max_abs();
        if (!r || c < *r) r = c;
    }
    if (r && *r < 0) r = 0;
    return r;
}

SortedIntSet combine(const SortedIntSet& a, const SortedIntSet& b, int sign) {
    std::vector<Integer> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.elements())
        for (const auto& y : b.elements()) out.push_back(sign > 0 ? Integer(x + y) : Integer(x - y));
    return SortedIntSet::from_elements(std::move(out), pair_bound(a, b));
}

}  // namespace

SortedIntSet sumset(const SortedIntSet& a, const SortedIntSet& b) { return combine(a, b, +1); }

SortedIntSet difference_set(const SortedIntSet& a, const SortedIntSet& b) {
    return combine(a, b, -1);
}

SortedIntSet signed_sums(const std::vector<Integer>& generators,
                         const std::vector<Integer>& bounds) {
    if (generators.size() != bounds.size())
        throw std::invalid_argument("signed_sums: generators/bounds length mismatch");
    for (const auto& g : generators)
        if (g <= 0) throw std::invalid_argument("signed_sums: generators must be positive");
    for (const auto& b : bounds)
        if (b < 0) throw std::invalid_argument("signed_sums: bounds must be nonnegative");
    auto acc = SortedIntSet::from_elements({Integer(0)});
    for (std::size_t i = 0; i < generators.size(); ++i) {
        std::vector<Integer> layer;
        for (Integer c = -bounds[i]; c <= bounds[i]; ++c) layer.push_back(c * generators[i]);
        acc = sumset(acc, SortedIntSet::from_elements(std::move(layer)));
    }
    return acc;
}

Integer find_gap_window(const SortedIntSet& s, const Integer& half_width,
                        const std::vector<Integer>& multipliers, const Integer& min_l) {
    if (!s.certified_bound())
        throw std::invalid_argument("find_gap_window: set carries no certified bound");
    if (multipliers.empty())
        throw std::invalid_argument("find_gap_window: need at least one multiplier");
    for (const auto& k : multipliers)
        if (k <= 0) throw std::invalid_argument("find_gap_window: multipliers must be positive");
    if (half_width < 0) throw std::invalid_argument("find_gap_window: negative half_width");
    if (min_l < 1) throw std::invalid_argument("find_gap_window: min_l must be >= 1");

    const Integer& bound = *s.certified_bound();
    Integer kmax = *std::max_element(multipliers.begin(), multipliers.end());
    // every window must stay inside the certified range
    Integer lmax = floor_div(bound - half_width, kmax);

    Integer l = min_l;
    while (l <= lmax) {
        bool ok = true;
        for (const auto& k : multipliers) {
            auto hit = s.first_in(k * l - half_width, k * l + half_width);
            if (hit) {
                // every l' with k*l' - hw <= hit also fails; skip past the witness
                Integer jump = floor_div(*hit + half_width, k) + 1;
                l = std::max(Integer(l + 1), jump);
                ok = false;
                break;
            }
        }
        if (ok) return l;
    }
    throw InsufficientTruncation("no qualifying gap within certified bound " + to_string(bound));
}

void LayeredSumset::push_layer(std::vector<Integer> layer) {
    if (layer.empty()) throw std::invalid_argument("LayeredSumset: empty layer");
    if (!std::is_sorted(layer.begin(), layer.end()))
        throw std::invalid_argument("LayeredSumset: layer must be sorted");
    if (prefix_lo_.empty()) {
        prefix_lo_.push_back(0);
        prefix_hi_.push_back(0);
    }
    span_lo_ = prefix_lo_.back() + layer.front();
    span_hi_ = prefix_hi_.back() + layer.back();
    prefix_lo_.push_back(span_lo_);
    prefix_hi_.push_back(span_hi_);
    layers_.push_back(std::move(layer));
    runs_valid_ = false;
}

std::optional<Integer> LayeredSumset::succ_rec(std::size_t i, const Integer& x,
                                               const std::optional<Integer>& cutoff) const {
    if (i == 0) {
        if (x <= 0 && (!cutoff || 0 < *cutoff)) return Integer(0);
        return std::nullopt;
    }
    const auto& layer = layers_[i - 1];
    std::optional<Integer> best;
    std::optional<Integer> cut = cutoff;
    for (const auto& g : layer) {
        Integer lo = g + prefix_lo_[i - 1];
        if (cut && lo >= *cut) break;  // layers ascend, no better branch remains
        Integer hi = g + prefix_hi_[i - 1];
        if (hi < x) continue;
        auto sub = succ_rec(i - 1, x - g, cut ? std::optional<Integer>(*cut - g) : std::nullopt);
        if (sub) {
            best = g + *sub;
            if (*best == x) break;  // cannot improve on an exact hit
            cut = best;
        }
    }
    return best;
}

std::optional<Integer> LayeredSumset::successor(const Integer& x) const {
    if (prefix_lo_.empty()) return x <= 0 ? std::optional<Integer>(Integer(0)) : std::nullopt;
    if (x > span_hi_) return std::nullopt;
    return succ_rec(layers_.size(), x, std::nullopt);
}

bool LayeredSumset::window_empty(const Integer& lo, const Integer& hi) const {
    if (lo > hi) return true;
    auto s = successor(lo);
    return !s || *s > hi;
}

bool LayeredSumset::contains(const Integer& x) const { return !window_empty(x, x); }

namespace {

using RunList = std::vector<std::pair<Integer, Integer>>;

// both lists sorted and disjoint; returns the components of the intersection
RunList intersect_runs(const RunList& a, const RunList& b) {
    RunList out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const Integer& lo = a[i].first >= b[j].first ? a[i].first : b[j].first;
        const Integer& hi = a[i].second <= b[j].second ? a[i].second : b[j].second;
        if (lo <= hi) out.emplace_back(lo, hi);
        if (a[i].second < b[j].second)
            ++i;
        else
            ++j;
    }
    return out;
}

}  // namespace

// A run of the n-layer sum is a stretch absent from every translate at once,
// so the run list of level n is the intersection of the translated run lists
// of level n-1, refiltered to window length.  Runs admitting a window are at
// least width + 1 long and hence at most span / width many, which keeps the
// lists short even when the sum itself is huge.
void LayeredSumset::rebuild_runs(const Integer& width) const {
    Integer need = Integer(width + 1);
    RunList runs;  // for G_1 + ... + G_n, clipped to its span
    for (std::size_t n = 0; n < layers_.size(); ++n) {
        const auto& g = layers_[n];
        const Integer& clo = prefix_lo_[n];
        const Integer& chi = prefix_hi_[n];
        const Integer& slo = prefix_lo_[n + 1];
        const Integer& shi = prefix_hi_[n + 1];
        RunList acc;
        bool first = true;
        for (const Integer& s : g) {
            RunList comp;
            Integer a = Integer(slo);
            Integer b = Integer(s + clo - 1);
            if (a <= b) comp.emplace_back(std::move(a), std::move(b));
            for (const auto& r : runs)
                comp.emplace_back(Integer(s + r.first), Integer(s + r.second));
            a = Integer(s + chi + 1);
            if (a <= shi) comp.emplace_back(std::move(a), Integer(shi));
            if (first) {
                acc = std::move(comp);
                first = false;
            } else {
                acc = intersect_runs(acc, comp);
            }
        }
        runs.clear();
        for (auto& r : acc)
            if (Integer(r.second - r.first + 1) >= need) runs.push_back(std::move(r));
    }
    runs_ = std::move(runs);
    runs_width_ = width;
    runs_valid_ = true;
}

std::optional<Integer> LayeredSumset::first_clean_start(const Integer& lo, const Integer& hi,
                                                        const Integer& width) const {
    if (width < 0) throw std::invalid_argument("LayeredSumset: negative gap width");
    if (lo > hi) return std::nullopt;
    if (!runs_valid_ || runs_width_ != width) rebuild_runs(width);
    // a clean window lies wholly below the span, inside one absent run, or
    // wholly above; it can never straddle a span edge, which is an element
    if (Integer(lo + width) < min_element()) return lo;
    for (const auto& r : runs_) {
        if (r.first > hi) return std::nullopt;
        const Integer& a = lo >= r.first ? lo : r.first;
        if (a <= Integer(r.second - width)) return a;
    }
    Integer a = Integer(max_element() + 1);
    if (a < lo) a = lo;
    if (a <= hi) return a;
    return std::nullopt;
}

std::vector<Integer> LayeredSumset::materialize() const {
    std::vector<Integer> acc{Integer(0)};
    for (const auto& layer : layers_) {
        std::vector<Integer> next;
        next.reserve(acc.size() * layer.size());
        for (const auto& a : acc)
            for (const auto& g : layer) next.push_back(a + g);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        acc = std::move(next);
    }
    return acc;
}

}  // namespace rank1lab
