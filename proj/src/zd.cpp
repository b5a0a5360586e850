#include "rank1lab/zd.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "rank1lab/jsonio.hpp"

namespace rank1lab {

namespace {

// tri-state slice of one axis against one box window
enum class Slice { empty, nonempty, unknown };

Slice axis_slice(const SortedIntSet& axis, const Integer& lo, const Integer& hi) {
    Integer clo = lo, chi = hi;
    bool clipped = false;
    if (!axis.exactly_finite()) {
        const Integer& b = *axis.certified_bound();
        if (clo < -b) {
            clo = -b;
            clipped = true;
        }
        if (chi > b) {
            chi = b;
            clipped = true;
        }
    }
    if (clo <= chi && axis.first_in(clo, chi).has_value()) return Slice::nonempty;
    return clipped ? Slice::unknown : Slice::empty;
}

// odometer over {-1,0,1}^d; returns false after the last pattern
bool next_pattern(std::vector<int>& eps) {
    std::size_t i = 0;
    while (i < eps.size() && eps[i] == 1) eps[i++] = -1;
    if (i == eps.size()) return false;
    ++eps[i];
    return true;
}

void fail(VerifyReport& rep, const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
}

}  // namespace

void validate_grid(const GridSpec& grid) {
    if (grid.d < 1) throw std::invalid_argument("grid dimension must be positive");
    if (static_cast<int>(grid.direction.size()) != grid.d)
        throw std::invalid_argument("direction length must equal the dimension");
    for (const auto& a : grid.direction)
        if (a <= 0) throw std::invalid_argument("direction entries must be positive");
    if (!grid.heights.empty() && grid.heights.front() < 1)
        throw std::invalid_argument("heights must be positive");
    for (std::size_t i = 0; i + 1 < grid.heights.size(); ++i)
        if (!(grid.heights[i] < grid.heights[i + 1]))
            throw std::invalid_argument("heights must be strictly increasing");
}

ProductLatticeSet ProductLatticeSet::from_axes(std::vector<SortedIntSet> axes) {
    if (axes.empty()) throw std::invalid_argument("a product needs at least one axis");
    ProductLatticeSet p;
    p.axes_ = std::move(axes);
    return p;
}

Integer ProductLatticeSet::point_count() const {
    Integer n = 1;
    for (const auto& a : axes_) n *= Integer(static_cast<long>(a.size()));
    return n;
}

bool ProductLatticeSet::contains(const std::vector<Integer>& p) const {
    if (p.size() != axes_.size())
        throw std::invalid_argument("point dimension does not match the product");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!axes_[i].contains(p[i])) return false;
    return true;
}

std::vector<std::vector<Integer>> ProductLatticeSet::materialize() const {
    if (point_count() > materialize_cap)
        throw std::invalid_argument("product too large to materialize");
    std::vector<std::vector<Integer>> out{{}};
    for (const auto& axis : axes_) {
        std::vector<std::vector<Integer>> next;
        next.reserve(out.size() * axis.size());
        for (const auto& prefix : out)
            for (const auto& x : axis.elements()) {
                auto q = prefix;
                q.push_back(x);
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

ProductLatticeSet zd_conservative_set(const GridSpec& grid, int m) {
    validate_grid(grid);
    if (m < 1) throw std::invalid_argument("stage index must be positive");
    if (static_cast<int>(grid.heights.size()) < m - 1)
        throw std::invalid_argument("grid lists too few heights for this stage");
    std::vector<SortedIntSet> axes;
    for (int i = 0; i < grid.d; ++i) {
        std::vector<Integer> scaled;
        for (int j = 0; j + 1 < m; ++j)
            scaled.push_back(Integer(grid.direction[static_cast<std::size_t>(i)] *
                                     grid.heights[static_cast<std::size_t>(j)]));
        axes.push_back(
            signed_sums(scaled, std::vector<Integer>(scaled.size(), Integer(1))));
    }
    return ProductLatticeSet::from_axes(std::move(axes));
}

Integer find_adequate_gap(const ProductLatticeSet& target, const std::vector<Integer>& direction,
                          const std::vector<Integer>& half_widths, const Integer& min_l,
                          const Integer& max_l, bool origin_exempt) {
    const int d = target.dim();
    if (static_cast<int>(direction.size()) != d || static_cast<int>(half_widths.size()) != d)
        throw std::invalid_argument("direction and half-widths must match the dimension");
    for (const auto& a : direction)
        if (a <= 0) throw std::invalid_argument("direction entries must be positive");
    for (const auto& w : half_widths)
        if (w < 0) throw std::invalid_argument("half-widths must be nonnegative");
    if (min_l < 1) throw std::invalid_argument("the scan must start at a positive height");

    for (Integer l = min_l; l <= max_l; l += 1) {
        bool all_clear = true;
        std::vector<int> eps(static_cast<std::size_t>(d), -1);
        do {
            bool zero = true;
            for (int e : eps)
                if (e != 0) zero = false;
            if (zero && origin_exempt) continue;
            // a box is clear as soon as one axis slice is provably empty;
            // it is dirty only when every axis is provably hit
            bool box_empty = false;
            bool box_unknown = false;
            for (int i = 0; i < d && !box_empty; ++i) {
                Integer center = Integer(eps[static_cast<std::size_t>(i)] *
                                         direction[static_cast<std::size_t>(i)] * l);
                switch (axis_slice(target.axes()[static_cast<std::size_t>(i)],
                                   Integer(center - half_widths[static_cast<std::size_t>(i)]),
                                   Integer(center + half_widths[static_cast<std::size_t>(i)]))) {
                    case Slice::empty:
                        box_empty = true;
                        break;
                    case Slice::unknown:
                        box_unknown = true;
                        break;
                    case Slice::nonempty:
                        break;
                }
            }
            if (box_empty) continue;
            if (box_unknown)
                throw InsufficientTruncation("a box cannot be decided within the certified axes");
            all_clear = false;
            break;
        } while (next_pattern(eps));
        if (all_clear) return l;
    }
    throw SearchExhausted("no adequate gap within the radius limit");
}

ZdCertificate build_zd_skyscraper(const ProductLatticeSet& target, std::vector<Integer> direction,
                                  int depth, std::string target_id, const Integer& window) {
    const int d = target.dim();
    if (static_cast<int>(direction.size()) != d)
        throw std::invalid_argument("direction length must match the target dimension");
    for (const auto& a : direction)
        if (a <= 0) throw std::invalid_argument("direction entries must be positive");
    if (depth < 1) throw std::invalid_argument("depth must be positive");

    ZdCertificate cert;
    cert.grid.d = d;
    cert.grid.direction = direction;
    cert.depth = depth;
    cert.target_id = std::move(target_id);

    Integer span = 0;  // max |signed sum| of the heights so far
    for (int n = 1; n <= depth; ++n) {
        std::vector<Integer> hw;
        for (int i = 0; i < d; ++i)
            hw.push_back(Integer(direction[static_cast<std::size_t>(i)] * span + n));
        Integer min_l =
            cert.grid.heights.empty() ? Integer(2) : Integer(2 * cert.grid.heights.back());

        // scan limit: bounded axes cap it; against an exactly finite target a
        // clear height surely exists once every axis window passes its range
        std::optional<Integer> lim;
        for (int i = 0; i < d; ++i) {
            const auto& axis = target.axes()[static_cast<std::size_t>(i)];
            if (axis.exactly_finite()) continue;
            Integer m = floor_div(Integer(*axis.certified_bound() - hw[static_cast<std::size_t>(i)]),
                                  direction[static_cast<std::size_t>(i)]);
            if (!lim || m < *lim) lim = m;
        }
        if (!lim) {
            Integer m = min_l;
            for (int i = 0; i < d; ++i) {
                Integer past =
                    floor_div(Integer(target.axes()[static_cast<std::size_t>(i)].max_abs() +
                                      hw[static_cast<std::size_t>(i)]),
                              direction[static_cast<std::size_t>(i)]) +
                    1;
                if (past > m) m = past;
            }
            lim = m;
        }

        Integer l;
        try {
            l = find_adequate_gap(target, direction, hw, min_l, *lim, true);
        } catch (const SearchExhausted&) {
            throw ZdConstructionStalled("no adequate height at stage " + std::to_string(n), n,
                                        cert);
        }
        cert.grid.heights.push_back(l);
        span += l;

        Fact f;
        f.kind = "zd_gap";
        f.operands["stage"] = n;
        f.operands["height"] = json_int(l);
        f.operands["half_widths"] = json_ints(hw);
        f.operands["min_height"] = json_int(min_l);
        f.claim = "every nonzero sign pattern box at this height misses the target";
        f.verified = true;
        cert.facts.push_back(std::move(f));
    }

    // closing: the product meets the target only at the origin exactly when
    // each axis' returns meet that axis of the target only at zero
    auto returns = zd_conservative_set(cert.grid, depth + 1);
    for (int i = 0; i < d; ++i) {
        const auto& mine = returns.axes()[static_cast<std::size_t>(i)];
        const auto& theirs = target.axes()[static_cast<std::size_t>(i)];
        Integer w = mine.max_abs();
        if (window > w) w = window;
        if (!theirs.exactly_finite() && *theirs.certified_bound() < w)
            throw InsufficientTruncation("axis " + std::to_string(i + 1) +
                                         " is not certified out to the closing window");
        Fact f;
        f.kind = "zd_axis_avoidance";
        f.operands["axis"] = i + 1;
        f.operands["returns"] = json_ints(mine.elements());
        f.operands["requested"] = json_int(window);
        f.operands["window"] = json_int(w);
        f.claim = "axis returns meet the target axis only at zero";
        for (const auto& x : mine.elements()) {
            if (x == 0) continue;
            if (theirs.contains(x))
                throw InvariantViolation("closing check failed on axis " + std::to_string(i + 1));
        }
        f.verified = true;
        cert.facts.push_back(std::move(f));
    }
    return cert;
}

VerifyReport verify_zd_certificate(const ZdCertificate& cert, const ProductLatticeSet& target) {
    VerifyReport rep;
    rep.ok = true;
    try {
        Integer requested = 0;
        for (const auto& f : cert.facts)
            if (f.kind == "zd_axis_avoidance") {
                requested = integer_from_json(f.operands.at("requested"));
                break;
            }
        auto rebuilt =
            build_zd_skyscraper(target, cert.grid.direction, cert.depth, cert.target_id, requested);
        if (rebuilt.grid.d != cert.grid.d) fail(rep, "dimension mismatch");
        if (rebuilt.grid.direction != cert.grid.direction) fail(rep, "direction mismatch");
        if (rebuilt.grid.heights != cert.grid.heights) fail(rep, "height sequence mismatch");
        if (rebuilt.target_id != cert.target_id) fail(rep, "target id mismatch");
        if (rebuilt.facts.size() != cert.facts.size()) {
            fail(rep, "statement count mismatch");
        } else {
            for (std::size_t i = 0; i < cert.facts.size(); ++i) {
                bool good = cert.facts[i].same_statement(rebuilt.facts[i]) &&
                            cert.facts[i].verified && rebuilt.facts[i].verified;
                rep.fact_ok.push_back(good);
                if (!good)
                    fail(rep, "statement " + std::to_string(i) + " does not match the rebuild");
            }
        }
        if (cert.facts.empty()) fail(rep, "certificate carries no statements");
    } catch (const std::exception& e) {
        fail(rep, std::string("rebuild failed: ") + e.what());
    }
    return rep;
}

}  // namespace rank1lab
