#include "rank1lab/interval_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace rank1lab {

IntervalSet IntervalSet::from_intervals(std::vector<Interval> ivs) {
    for (const auto& [a, b] : ivs)
        if (a > b) throw std::invalid_argument("interval with negative length");
    ivs.erase(std::remove_if(ivs.begin(), ivs.end(),
                             [](const Interval& iv) { return iv.first == iv.second; }),
              ivs.end());
    std::sort(ivs.begin(), ivs.end());
    IntervalSet out;
    for (auto& iv : ivs) {
        if (!out.ivs_.empty() && iv.first <= out.ivs_.back().second) {
            if (iv.second > out.ivs_.back().second) out.ivs_.back().second = iv.second;
        } else {
            out.ivs_.push_back(std::move(iv));
        }
    }
    return out;
}

IntervalSet IntervalSet::interval(const Rational& a, const Rational& b) {
    return from_intervals({{a, b}});
}

Rational IntervalSet::measure() const {
    Rational out = 0;
    for (const auto& [a, b] : ivs_) out += b - a;
    return out;
}

bool IntervalSet::contains_point(const Rational& x) const {
    // first piece past x, then look left
    auto it = std::upper_bound(ivs_.begin(), ivs_.end(), x,
                               [](const Rational& v, const Interval& iv) { return v < iv.first; });
    if (it == ivs_.begin()) return false;
    --it;
    return x < it->second;
}

const Rational& IntervalSet::min() const {
    if (ivs_.empty()) throw std::invalid_argument("empty set has no endpoints");
    return ivs_.front().first;
}

const Rational& IntervalSet::max() const {
    if (ivs_.empty()) throw std::invalid_argument("empty set has no endpoints");
    return ivs_.back().second;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> all = ivs_;
    all.insert(all.end(), o.ivs_.begin(), o.ivs_.end());
    return from_intervals(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    size_t i = 0, j = 0;
    while (i < ivs_.size() && j < o.ivs_.size()) {
        const Rational& lo = std::max(ivs_[i].first, o.ivs_[j].first);
        const Rational& hi = std::min(ivs_[i].second, o.ivs_[j].second);
        if (lo < hi) out.push_back({lo, hi});
        if (ivs_[i].second < o.ivs_[j].second)
            ++i;
        else
            ++j;
    }
    return from_intervals(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& o) const {
    std::vector<Interval> out;
    size_t j = 0;
    for (const auto& [a, b] : ivs_) {
        Rational cur = a;
        while (j < o.ivs_.size() && o.ivs_[j].second <= cur) ++j;
        size_t k = j;
        while (k < o.ivs_.size() && o.ivs_[k].first < b) {
            if (cur < o.ivs_[k].first) out.push_back({cur, o.ivs_[k].first});
            if (o.ivs_[k].second > cur) cur = o.ivs_[k].second;
            ++k;
        }
        if (cur < b) out.push_back({cur, b});
    }
    return from_intervals(std::move(out));
}

IntervalSet IntervalSet::translate(const Rational& dx) const {
    IntervalSet out;
    out.ivs_.reserve(ivs_.size());
    for (const auto& [a, b] : ivs_) out.ivs_.push_back({a + dx, b + dx});
    return out;
}

}  // namespace rank1lab
