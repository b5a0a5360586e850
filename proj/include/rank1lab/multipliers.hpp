#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rank1lab/errors.hpp"
#include "rank1lab/intcomb.hpp"
#include "rank1lab/numeric.hpp"
#include "rank1lab/tower.hpp"

namespace rank1lab {

// Membership oracle for a (possibly unbounded) symmetric set of integers,
// queried through a certified window that the oracle may widen on demand.
class GapOracle {
public:
    virtual ~GapOracle() = default;

    // Try to make membership decidable on [-window, window]; false when the
    // oracle cannot reach that far.
    virtual bool certify(const Integer& window) = 0;

    // Both throw InsufficientTruncation outside the certified window.
    virtual bool member(const Integer& x) = 0;
    virtual std::optional<Integer> first_in(const Integer& lo, const Integer& hi) = 0;

    // Smallest A in [lo, hi] with [A, A + width] free of the set, if any.
    // [lo, hi + width] must sit inside the certified window.  The base
    // version crawls by successor; oracles with structure override it so the
    // gap scan can step over a dense stretch in one query.
    virtual std::optional<Integer> first_gap_start(const Integer& lo, const Integer& hi,
                                                   const Integer& width);

    virtual std::string id() const = 0;
};

// Return times of a level, held in factored per-stage form so certify() costs
// one small layer per stage instead of a materialized product.
class TowerGapOracle : public GapOracle {
public:
    TowerGapOracle(CutSpacerSpec spec, LevelId level = {1, 0});

    bool certify(const Integer& window) override;
    bool member(const Integer& x) override;
    std::optional<Integer> first_in(const Integer& lo, const Integer& hi) override;
    std::optional<Integer> first_gap_start(const Integer& lo, const Integer& hi,
                                           const Integer& width) override;
    std::string id() const override;

    const Integer& bound() const { return bound_; }
    int stages_absorbed() const { return next_stage_; }

private:
    CutSpacerSpec spec_;
    LevelId level_;
    LayeredSumset sums_;
    Integer bound_;
    int next_stage_;
};

// A fixed integer set; certification is whatever the set itself carries.
class FixedSetOracle : public GapOracle {
public:
    FixedSetOracle(SortedIntSet set, std::string id);

    bool certify(const Integer& window) override;
    bool member(const Integer& x) override;
    std::optional<Integer> first_in(const Integer& lo, const Integer& hi) override;
    std::optional<Integer> first_gap_start(const Integer& lo, const Integer& hi,
                                           const Integer& width) override;
    std::string id() const override;

private:
    SortedIntSet set_;
    std::string id_;
};

// Smallest l >= min_l such that [k*l - half_width, k*l + half_width] misses
// every oracle for every multiplier k.  Scans with witness jumps, widening the
// oracles as l grows; throws InsufficientTruncation when some oracle cannot
// certify the needed window.  Multipliers must be positive and strictly
// increasing, min_l >= 1, half_width >= 0.
Integer find_gap(GapOracle& target, const Integer& half_width,
                 const std::vector<Integer>& multipliers, const Integer& min_l);
Integer find_gap_union(const std::vector<GapOracle*>& targets, const Integer& half_width,
                       const std::vector<Integer>& multipliers, const Integer& min_l);

enum class CertStyle { skyscraper, rigid, iei, family, thm41, ergodic };

std::string to_string(CertStyle style);
CertStyle cert_style_from_string(const std::string& s);  // ParseError on junk

// One checked statement.  `operands` holds every number the claim is about;
// verification recomputes the same fact from scratch and compares operand for
// operand, so a certificate edited anywhere no longer matches.
struct Fact {
    std::string kind;
    nlohmann::ordered_json operands;
    std::string claim;
    bool verified = false;

    bool same_statement(const Fact& o) const {
        return kind == o.kind && operands == o.operands && claim == o.claim;
    }
};

// heights: column heights h_1.. of the constructed spec, in order.  For the
// four-cut style the fixed opening stage contributes the leading height, so
// the vector has depth+1 entries; elsewhere depth of them.  For ergodic
// certificates the vector holds the chosen powers instead.
struct MultiplierCertificate {
    CertStyle style = CertStyle::skyscraper;
    std::vector<Integer> heights;
    int depth = 0;
    std::vector<std::string> target_ids;
    std::vector<Fact> facts;
};

// A builder ran out of certified room (or candidates) before finishing.
// stage_reached is the round that failed, 1-based; depth+1 marks a failure in
// the closing window check.  The partial certificate keeps what was committed.
struct ConstructionStalled : Error {
    int stage_reached;
    MultiplierCertificate partial;
    ConstructionStalled(const std::string& what, int stage, MultiplierCertificate cert)
        : Error(what), stage_reached(stage), partial(std::move(cert)) {}
};

// Avoidance builders.  Each round picks the next column height through the
// gap scan, then the closing fact checks every nonzero signed combination of
// the heights against the target over at least [-window, window].
//   skyscraper: two cuts, multiplier {1}, next height at least twice the last
//   rigid:      round n uses multipliers 1..n (stage n is cut n+1 ways) and
//               insists on height >= (n+1) * previous
//   iei:        four cuts per stage; round n picks a with b = 5na, block
//               heights (a, b, a-1, n(2a+b-1+h)+1); candidates screened by
//               the multiplier quadruple {1, 5n, 6n, 6n+1}, then the whole
//               extended return set is checked directly, advancing a on any
//               collision
//   family:     skyscraper scan where round n avoids the first min(n, count)
//               targets at once; closing facts check target i against the
//               combinations of heights i.. (its own joining column)
MultiplierCertificate build_avoiding_skyscraper(GapOracle& target, int depth,
                                                const Integer& window = 0);
MultiplierCertificate build_avoiding_rigid(GapOracle& target, int depth,
                                           const Integer& window = 0);
MultiplierCertificate build_avoiding_iei(GapOracle& target, int depth,
                                         const Integer& window = 0);
MultiplierCertificate build_avoiding_family(const std::vector<GapOracle*>& targets, int depth,
                                            const Integer& window = 0);

// Doubling-return construction against a tower target.  Picks stages n_i whose
// short return H_i = h_{n_i+1} - (last block height) at least doubles, checks
// the growth inequality at every stage through n_M, the unit-shift
// disjointness of the two return sets at each depth, and (up to
// rigidity_depth) measures both systems' overlap ratio at H_i.
MultiplierCertificate build_thm41(const CutSpacerSpec& target, int depth, int rigidity_depth = 4);

// Visits the first `budget` ordered level pairs of the target's columns
// (column 1 first), granting each a power n = block sum + height offset that
// more than doubles the previous one and carries overlap at least
// 1/declared_sup_cuts of the source level.  Requires declared_sup_cuts.
MultiplierCertificate build_ergodic(const CutSpacerSpec& target, int budget);

struct VerifyReport {
    bool ok = false;
    std::vector<bool> fact_ok;  // parallel to the certificate's facts
    std::vector<std::string> failures;
};

// Re-runs the matching builder against the given targets and compares the
// outcome statement by statement.  Any divergence (heights, operands, claim
// results, target ids) is reported; nothing is trusted from the certificate.
VerifyReport verify_certificate(const MultiplierCertificate& cert,
                                const std::vector<GapOracle*>& targets);
VerifyReport verify_certificate(const MultiplierCertificate& cert, const CutSpacerSpec& target);

// Reconstructs the built spec from a certificate's heights.  Not defined for
// ergodic certificates (they describe powers, not a construction).
CutSpacerSpec spec_from_certificate(const MultiplierCertificate& cert);

}  // namespace rank1lab
