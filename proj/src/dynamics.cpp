#include "rank1lab/dynamics.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "rank1lab/errors.hpp"

namespace rank1lab {

namespace {

int env_depth_cap() {
    if (const char* e = std::getenv("RANK1LAB_DEPTH_CAP")) {
        int v = std::atoi(e);
        if (v > 0) return v;
    }
    return 24;
}

Integer pow2(int k) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k));
    return p;
}

}  // namespace

DynamicsEngine::DynamicsEngine(CutSpacerSpec spec, std::optional<int> depth_cap)
    : spec_(std::move(spec)), depth_cap_(depth_cap.value_or(env_depth_cap())) {
    if (depth_cap_ < 0) throw std::invalid_argument("depth cap must be nonnegative");
    ColumnRealization c0;
    c0.stage = 0;
    c0.units = 1;
    c0.level_pos = {0};
    c0.pos_level = {0};
    cache_.push_back(std::move(c0));
}

const ColumnRealization& DynamicsEngine::column(int n) {
    if (n < 0) throw std::invalid_argument("column index must be nonnegative");
    if (n > depth_cap_)
        throw DepthCapExceeded("column " + std::to_string(n) + " beyond the depth cap " +
                               std::to_string(depth_cap_));
    if (spec_.height(n) > cell_cap)
        throw DepthCapExceeded("column " + std::to_string(n) + " needs " +
                               to_string(spec_.height(n)) + " cells, cap is " +
                               std::to_string(cell_cap));
    while (static_cast<int>(cache_.size()) <= n) {
        const ColumnRealization& prev = cache_.back();
        Stage st = spec_.stage(prev.stage);
        std::int64_t h = prev.height();
        std::int64_t next_h = *to_int64(spec_.height(prev.stage + 1));
        ColumnRealization next;
        next.stage = prev.stage + 1;
        next.units = prev.units * st.r;
        next.level_pos.reserve(next_h);
        std::int64_t frontier = h * st.r;
        for (int k = 0; k < st.r; ++k) {
            for (std::int64_t i = 0; i < h; ++i)
                next.level_pos.push_back(prev.level_pos[i] * st.r + k);
            std::int64_t s = *to_int64(st.spacers[k]);
            for (std::int64_t j = 0; j < s; ++j) next.level_pos.push_back(frontier++);
        }
        next.pos_level.assign(next_h, 0);
        for (std::int64_t i = 0; i < next_h; ++i) next.pos_level[next.level_pos[i]] = i;
        cache_.push_back(std::move(next));
    }
    return cache_[n];
}

IntervalSet DynamicsEngine::realize_level(const LevelId& level) {
    validate_level(spec_, level);
    const ColumnRealization& col = column(level.stage);
    std::int64_t pos = col.level_pos[*to_int64(level.height)];
    Integer units(col.units);
    return IntervalSet::interval(make_rational(Integer(pos), units),
                                 make_rational(Integer(pos + 1), units));
}

int DynamicsEngine::pick_depth(int stage_hint, const Integer& n) {
    Integer need = spec_.height(stage_hint) + int_abs(n);
    int M = stage_hint;
    while (spec_.height(M) < need) {
        if (M >= depth_cap_)
            throw DepthCapExceeded("no realizable column tall enough for a shift by " +
                                   to_string(n));
        ++M;
    }
    return M;
}

PowerResult DynamicsEngine::apply_power(const IntervalSet& set, const Integer& n,
                                        int stage_hint) {
    {
        const ColumnRealization& hint_col = column(stage_hint);
        if (!set.empty() && (set.min() < 0 || set.max() > hint_col.support_end()))
            throw std::invalid_argument("set must sit inside the hinted column footprint");
    }
    int M = pick_depth(stage_hint, n);
    const ColumnRealization& col = column(M);
    PowerResult out;
    out.depth_used = M;
    out.lost_mass = 0;
    if (set.empty()) return out;

    std::int64_t h = col.height();
    std::int64_t shift = *to_int64(n);
    Integer units(col.units);
    std::vector<IntervalSet::Interval> pieces;
    for (const auto& [a, b] : set.intervals()) {
        std::int64_t p = *to_int64(floor_div(a.get_num() * units, a.get_den()));
        while (true) {
            Rational cell_lo = make_rational(Integer(p), units);
            if (cell_lo >= b) break;
            Rational cell_hi = make_rational(Integer(p + 1), units);
            const Rational& lo = std::max(a, cell_lo);
            const Rational& hi = std::min(b, cell_hi);
            std::int64_t target = col.pos_level[p] + shift;
            if (target >= 0 && target < h) {
                Rational delta = make_rational(Integer(col.level_pos[target] - p), units);
                pieces.push_back({lo + delta, hi + delta});
            } else {
                out.lost_mass += hi - lo;
            }
            ++p;
        }
    }
    out.image = IntervalSet::from_intervals(std::move(pieces));
    return out;
}

PowerResult DynamicsEngine::apply_power_lossless(const IntervalSet& set, const Integer& n,
                                                 int stage_hint) {
    int hint = stage_hint;
    while (true) {
        PowerResult r = apply_power(set, n, hint);
        if (r.lost_mass == 0) return r;
        hint = r.depth_used + 1;  // column() stops runaway deepening
    }
}

SortedIntSet DynamicsEngine::conservative_seq(const LevelId& level, const Integer& window) {
    validate_level(spec_, level);
    if (window < 0) throw std::invalid_argument("window must be nonnegative");
    int M = truncation_stage(spec_, level, window);
    Integer need = spec_.height(level.stage) + window;
    while (spec_.height(M) < need) ++M;

    const ColumnRealization& colc = column(level.stage);
    const ColumnRealization& colM = column(M);
    std::int64_t factor = colM.units / colc.units;
    std::int64_t lo = colc.level_pos[*to_int64(level.height)] * factor;
    std::int64_t hi = lo + factor;
    std::int64_t h = colM.height();
    std::vector<char> in(h, 0);
    std::vector<std::int64_t> levels;
    for (std::int64_t i = 0; i < h; ++i)
        if (colM.level_pos[i] >= lo && colM.level_pos[i] < hi) {
            in[i] = 1;
            levels.push_back(i);
        }

    std::int64_t wn = *to_int64(window);
    std::vector<std::int64_t> hits;
    for (std::int64_t d = 1; d <= wn; ++d)
        for (std::int64_t j : levels)
            if (j + d < h && in[j + d]) {
                hits.push_back(d);
                break;
            }
    std::vector<Integer> elems;
    for (auto it = hits.rbegin(); it != hits.rend(); ++it) elems.emplace_back(-*it);
    elems.emplace_back(0);
    for (std::int64_t d : hits) elems.emplace_back(d);
    return SortedIntSet::from_elements(std::move(elems), window);
}

void DynamicsEngine::require_alignment(const IntervalSet& set, int column_index,
                                       std::vector<char>& level_mask) {
    const ColumnRealization& col = column(column_index);
    if (set.empty()) throw std::invalid_argument("need a set of positive measure");
    if (set.min() < 0 || set.max() > col.support_end())
        throw std::invalid_argument("set must sit inside the column footprint");
    level_mask.assign(col.height(), 0);
    Rational units = make_rational(Integer(col.units), Integer(1));
    for (const auto& [a, b] : set.intervals()) {
        Rational pa = a * units;
        Rational pb = b * units;
        if (pa.get_den() != 1 || pb.get_den() != 1)
            throw std::invalid_argument("set is not a union of levels of that column");
        std::int64_t lo = *to_int64(Integer(pa.get_num()));
        std::int64_t hi = *to_int64(Integer(pb.get_num()));
        for (std::int64_t p = lo; p < hi; ++p) level_mask[col.pos_level[p]] = 1;
    }
}

SortedIntSet DynamicsEngine::conservative_seq(const IntervalSet& set, int column_index,
                                              const Integer& window) {
    if (window < 0) throw std::invalid_argument("window must be nonnegative");
    std::vector<char> mask;
    require_alignment(set, column_index, mask);

    // returns entering past depth M have magnitude at least
    // 1 + sum of the last spacers of stages column_index..M-1
    Integer guard = 1;
    int M = column_index;
    while (guard <= window) {
        if (M - column_index >= 64)
            throw NonTerminating("spacer growth too slow to separate the levels within |x| <= " +
                                 to_string(window));
        guard += spec_.last_spacer(M);
        ++M;
    }
    Integer need = spec_.height(column_index) + window;
    while (spec_.height(M) < need) ++M;

    const ColumnRealization& colc = column(column_index);
    const ColumnRealization& colM = column(M);
    std::int64_t factor = colM.units / colc.units;
    std::int64_t h = colM.height();
    std::int64_t hc = colc.height();
    std::vector<char> in(h, 0);
    std::vector<std::int64_t> levels;
    for (std::int64_t i = 0; i < h; ++i) {
        std::int64_t cell = colM.level_pos[i] / factor;
        if (cell < hc && mask[colc.pos_level[cell]]) {
            in[i] = 1;
            levels.push_back(i);
        }
    }

    std::int64_t wn = *to_int64(window);
    std::vector<std::int64_t> hits;
    for (std::int64_t d = 1; d <= wn; ++d)
        for (std::int64_t j : levels)
            if (j + d < h && in[j + d]) {
                hits.push_back(d);
                break;
            }
    std::vector<Integer> elems;
    for (auto it = hits.rbegin(); it != hits.rend(); ++it) elems.emplace_back(-*it);
    elems.emplace_back(0);
    for (std::int64_t d : hits) elems.emplace_back(d);
    return SortedIntSet::from_elements(std::move(elems), window);
}

Rational DynamicsEngine::partial_rigidity_ratio(const IntervalSet& set, const Integer& n,
                                                int stage_hint) {
    if (set.empty()) throw std::invalid_argument("need a set of positive measure");
    PowerResult r = apply_power_lossless(set, int_abs(n), stage_hint);
    return r.image.intersect(set).measure() / set.measure();
}

RefineResult DynamicsEngine::refine_for_gaps(const IntervalSet& seed, int seed_column,
                                             const Rational& eps, int rounds,
                                             const Integer& search_bound) {
    std::vector<char> seed_mask;
    require_alignment(seed, seed_column, seed_mask);
    Rational full = seed.measure();
    if (eps <= 0 || eps >= full)
        throw std::invalid_argument("removal budget must lie strictly between 0 and the measure");
    if (rounds < 1) throw std::invalid_argument("need at least one round");
    if (search_bound < 1) throw std::invalid_argument("search bound must be positive");

    RefineResult res;
    res.refined = seed;
    res.column = seed_column;
    res.removed = 0;
    Integer ell = 0;
    for (int round = 0; round < rounds; ++round) {
        // short forward tube over the current set; removing a step's overlap
        // with the tube empties the whole window around that step
        IntervalSet tube = res.refined;
        int tube_col = res.column;
        for (int j = 1; j <= round + 1; ++j) {
            PowerResult pj = apply_power_lossless(res.refined, j, res.column);
            tube = tube.unite(pj.image);
            tube_col = std::max(tube_col, pj.depth_used);
        }
        Rational budget = eps * make_rational(Integer(1), pow2(round + 1));
        bool placed = false;
        for (Integer cand = ell + 1; cand <= search_bound; ++cand) {
            PowerResult fwd = apply_power_lossless(tube, cand, tube_col);
            IntervalSet bad = fwd.image.intersect(res.refined);
            int used = std::max(tube_col, fwd.depth_used);
            PowerResult fa = apply_power_lossless(res.refined, cand, res.column);
            IntervalSet mirrored = tube.intersect(fa.image);
            used = std::max(used, fa.depth_used);
            if (!mirrored.empty()) {
                // the mirrored part sits inside the forward image, so its
                // preimage exists in full at this depth
                PowerResult bk = apply_power_lossless(mirrored, -cand, fa.depth_used);
                bad = bad.unite(bk.image.intersect(res.refined));
                used = std::max(used, bk.depth_used);
            }
            if (bad.measure() < budget) {
                res.refined = res.refined.subtract(bad);
                res.removed += bad.measure();
                res.column = std::max(res.column, used);
                res.steps.push_back(cand);
                res.windows.push_back({Integer(cand - (round + 1)), Integer(cand + (round + 1))});
                ell = cand;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw SearchExhausted("no admissible step up to " + to_string(search_bound) +
                                  " in round " + std::to_string(round + 1));
    }
    res.final_measure = res.refined.measure();

    // the certified windows must be invisible to the return-time machinery
    Integer vw = res.steps.back() + rounds;
    SortedIntSet returns = conservative_seq(res.refined, res.column, vw);
    for (const auto& [lo, hi] : res.windows)
        for (Integer v = lo; v <= hi; ++v)
            if (returns.contains(v))
                throw InvariantViolation("refined set keeps a return at " + to_string(v));
    return res;
}

namespace {

struct PreimageWindow {
    IntervalSet set;
    Rational slack;  // unrealized preimage mass: escaped plus uncovered
};

PreimageWindow preimage_window(DynamicsEngine& eng, const IntervalSet& d, const Rational& mu) {
    std::optional<PreimageWindow> best;
    Rational tol = mu / 256;
    for (int M = 1;; ++M) {
        try {
            const ColumnRealization& col = eng.column(M);
            IntervalSet inside = d.intersect(IntervalSet::interval(0, col.support_end()));
            Rational uncovered = mu - inside.measure();
            PowerResult pr = eng.apply_power(inside, -1, M);
            Rational slack = pr.lost_mass + uncovered;
            best = PreimageWindow{pr.image, slack};
            if (slack <= tol) break;
        } catch (const DepthCapExceeded&) {
            break;  // keep the last sound enclosure, however loose
        }
    }
    if (!best) throw DepthCapExceeded("no depth available for a window preimage");
    return *best;
}

}  // namespace

DistanceEnclosure weak_distance(DynamicsEngine& t, DynamicsEngine& s, int terms, int max_j) {
    if (terms < 1) throw std::invalid_argument("need at least one term");
    if (max_j < 0 || max_j > 30) throw std::invalid_argument("window family depth out of range");
    long available = 0;
    for (int j = 0; j <= max_j && available < terms; ++j) available += 1L << (2 * j);
    if (available < terms)
        throw std::invalid_argument("window family too small for the requested terms");

    DistanceEnclosure out{0, 0};
    int i = 0;
    for (int j = 0; j <= max_j && i < terms; ++j) {
        Integer denom = pow2(j);
        Rational mu = make_rational(Integer(1), denom);
        long kcount = 1L << (2 * j);
        for (long k = 0; k < kcount && i < terms; ++k) {
            ++i;
            IntervalSet d = IntervalSet::from_intervals(
                {{make_rational(Integer(k), denom), make_rational(Integer(k + 1), denom)}});
            PreimageWindow pt = preimage_window(t, d, mu);
            PreimageWindow ps = preimage_window(s, d, mu);
            Rational delta =
                pt.set.subtract(ps.set).measure() + ps.set.subtract(pt.set).measure();
            Rational lo = delta - pt.slack - ps.slack;
            if (lo < 0) lo = 0;
            Rational hi = delta + pt.slack + ps.slack;
            Rational cap = 2 * mu;
            if (hi > cap) hi = cap;
            Rational weight = make_rational(denom, pow2(i));  // 1 / (2^i mu)
            out.lower += lo * weight;
            out.upper += hi * weight;
        }
    }
    out.upper += make_rational(Integer(2), pow2(terms));
    return out;
}

}  // namespace rank1lab
