#pragma once

#include <string>
#include <vector>

#include "rank1lab/errors.hpp"
#include "rank1lab/intcomb.hpp"
#include "rank1lab/multipliers.hpp"
#include "rank1lab/numeric.hpp"

namespace rank1lab {

// Product of d height-driven constructions sharing one height sequence,
// skewed per axis by a positive direction entry: axis i steps in units of
// direction[i] * h_j.
struct GridSpec {
    int d = 1;
    std::vector<Integer> direction;
    std::vector<Integer> heights;
};

void validate_grid(const GridSpec& grid);

// Cartesian product of per-axis sorted sets.  Membership and box queries stay
// per-axis; materializing is gated because the point count is the product.
class ProductLatticeSet {
public:
    static ProductLatticeSet from_axes(std::vector<SortedIntSet> axes);

    const std::vector<SortedIntSet>& axes() const { return axes_; }
    int dim() const { return static_cast<int>(axes_.size()); }
    Integer point_count() const;

    bool contains(const std::vector<Integer>& p) const;

    // lexicographically sorted points; refuses above the cap
    static constexpr long materialize_cap = 1000000;
    std::vector<std::vector<Integer>> materialize() const;

private:
    std::vector<SortedIntSet> axes_;
};

// Stage-m returns of the product system: axis i holds the signed sums of
// direction[i] * heights[0 .. m-2].
ProductLatticeSet zd_conservative_set(const GridSpec& grid, int m);

// Least l in [min_l, max_l] such that for every sign pattern eps in
// {-1,0,1}^d the box centered at l * (eps_i * direction_i) with the given
// per-axis half-widths misses the target.  A box is clear as soon as one axis
// slice is empty.  With origin_exempt the all-zero pattern is skipped (its
// box always holds the origin).  Throws SearchExhausted when the range runs
// out and InsufficientTruncation when an axis cannot be decided within its
// certified bound.
Integer find_adequate_gap(const ProductLatticeSet& target, const std::vector<Integer>& direction,
                          const std::vector<Integer>& half_widths, const Integer& min_l,
                          const Integer& max_l, bool origin_exempt);

struct ZdCertificate {
    GridSpec grid;
    int depth = 0;
    std::string target_id;
    std::vector<Fact> facts;
};

struct ZdConstructionStalled : Error {
    int stage_reached;
    ZdCertificate partial;
    ZdConstructionStalled(const std::string& what, int stage, ZdCertificate cert)
        : Error(what), stage_reached(stage), partial(std::move(cert)) {}
};

// Mirrors the one-dimensional skyscraper build: round n scans for a height at
// least double the last, margins max|axis returns| + n per axis, patterns
// checked origin-exempt.  Closing facts check each axis' returns against the
// target's axis; that is exactly product avoidance, since any nonzero common
// point projects to a nonzero hit on some axis with zeros available
// elsewhere.  With d = 1 and direction (1) the heights coincide with
// build_avoiding_skyscraper on the same set.
ZdCertificate build_zd_skyscraper(const ProductLatticeSet& target,
                                  std::vector<Integer> direction, int depth,
                                  std::string target_id, const Integer& window = 0);

VerifyReport verify_zd_certificate(const ZdCertificate& cert, const ProductLatticeSet& target);

}  // namespace rank1lab
