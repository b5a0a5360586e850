#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "rank1lab/intcomb.hpp"
#include "rank1lab/interval_set.hpp"
#include "rank1lab/tower.hpp"

namespace rank1lab {

// Column n laid out on the half line: level i occupies
//   [level_pos[i] * w, (level_pos[i] + 1) * w),  w = 1 / units.
// Levels and positions both range over [0, h_n); pos_level inverts level_pos.
struct ColumnRealization {
    int stage = 0;
    std::int64_t units = 1;
    std::vector<std::int64_t> level_pos;
    std::vector<std::int64_t> pos_level;

    std::int64_t height() const { return static_cast<std::int64_t>(level_pos.size()); }
    Rational width() const { return make_rational(Integer(1), Integer(units)); }
    // right end of the column's footprint [0, h_n * w)
    Rational support_end() const { return make_rational(Integer(height()), Integer(units)); }
};

struct PowerResult {
    IntervalSet image;
    Rational lost_mass;  // mass shifted past the realized column, top or bottom
    int depth_used = 0;
};

struct RefineResult {
    IntervalSet refined;
    int column = 0;  // refined is a union of this column's levels
    std::vector<Integer> steps;
    // [steps[i] - (i+1), steps[i] + (i+1)], certified free of returns
    std::vector<std::pair<Integer, Integer>> windows;
    Rational removed;
    Rational final_measure;
};

// Exact arithmetic model of the transformation built by a cut-and-stack
// construction.  Realizations are cached per column; depth is limited both by
// a stage cap (RANK1LAB_DEPTH_CAP overrides the default of 24) and by a hard
// cell count cap.
class DynamicsEngine {
public:
    static constexpr std::int64_t cell_cap = std::int64_t(1) << 27;

    explicit DynamicsEngine(CutSpacerSpec spec, std::optional<int> depth_cap = std::nullopt);

    const CutSpacerSpec& spec() const { return spec_; }
    int depth_cap() const { return depth_cap_; }

    const ColumnRealization& column(int n);
    IntervalSet realize_level(const LevelId& level);

    // Applies T^n at the least depth M >= stage_hint with h_M >= h_hint + |n|.
    // The set must lie inside the hinted column's footprint.  Mass shifted out
    // of the realized column is reported, not silently dropped.
    PowerResult apply_power(const IntervalSet& set, const Integer& n, int stage_hint);
    // deepens until nothing is lost
    PowerResult apply_power_lossless(const IntervalSet& set, const Integer& n, int stage_hint);

    // Return times of a level, exact for every |x| <= window.
    SortedIntSet conservative_seq(const LevelId& level, const Integer& window);
    // Same for a union of full levels of the given column.
    SortedIntSet conservative_seq(const IntervalSet& set, int column, const Integer& window);

    // mu(T^n S intersect S) / mu(S), exact; sign of n is immaterial
    Rational partial_rigidity_ratio(const IntervalSet& set, const Integer& n, int stage_hint);

    // Carves a set of measure > mu(seed) - eps out of seed whose return times
    // miss the windows [steps[i] -+ (i+1)].  Round i+1 admits at most
    // eps / 2^(i+1) of removed mass; candidate steps are searched up to
    // search_bound.  The result is re-verified through the return-time path.
    RefineResult refine_for_gaps(const IntervalSet& seed, int seed_column, const Rational& eps,
                                 int rounds, const Integer& search_bound);

private:
    int pick_depth(int stage_hint, const Integer& n);
    void require_alignment(const IntervalSet& set, int column_index,
                           std::vector<char>& level_mask);

    CutSpacerSpec spec_;
    int depth_cap_;
    std::deque<ColumnRealization> cache_;
};

struct DistanceEnclosure {
    Rational lower;
    Rational upper;
};

// Enclosure of the weighted matching distance between two constructions over
// the canonical dyadic test family: term i compares the T and S preimages of
// the i-th window with weight 2^-i; terms beyond `terms` contribute the tail
// bound 2^(1-terms) to the upper end.  Windows sweep [k/2^j, (k+1)/2^j) for
// j = 0..max_j, 0 <= k < 4^j.
DistanceEnclosure weak_distance(DynamicsEngine& t, DynamicsEngine& s, int terms, int max_j);

}  // namespace rank1lab
