#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rank1lab/intcomb.hpp"
#include "rank1lab/numeric.hpp"

namespace rank1lab {

// One cutting stage: r subcolumns, spacers[k] spacer levels on top of
// subcolumn k (left to right).
struct Stage {
    int r = 2;
    std::vector<Integer> spacers;
};

// A level is addressed by the column it belongs to and its height in that
// column, 0 = base.
struct LevelId {
    int stage = 1;
    Integer height = 0;
};

// Cut-and-stack construction data: explicit stages plus an optional generator
// rule for extending on demand.  Stage extension is memoized; the cache is
// guarded so concurrent readers are safe.
class CutSpacerSpec {
public:
    using RuleFn = std::function<Stage(int n, const Integer& h_n)>;

    static CutSpacerSpec from_stages(std::string name, std::vector<Stage> stages);
    static CutSpacerSpec with_rule(std::string name, std::string rule_name, RuleFn rule,
                                   std::vector<Stage> prefix = {},
                                   std::optional<int> declared_sup_cuts = std::nullopt);
    // "hajian_kakutani" | "infinite_chacon"
    static CutSpacerSpec preset(const std::string& name);
    // two cuts per stage, spacers only on the right subcolumn, column heights
    // equal to the given strictly increasing sequence (each at least double
    // its predecessor, first >= 2)
    static CutSpacerSpec skyscraper(std::vector<Integer> heights, std::string name = "skyscraper");

    const std::string& name() const { return name_; }
    const std::optional<std::string>& rule_name() const { return rule_name_; }
    bool has_rule() const { return static_cast<bool>(rule_); }
    int explicit_stage_count() const { return explicit_count_; }
    std::optional<int> declared_sup_cuts() const { return declared_sup_cuts_; }

    Stage stage(int n) const;           // MissingStage when unavailable
    Integer height(int n) const;        // h_n, h_0 = 1
    std::vector<Integer> heights(int upto) const;  // h_0..h_upto
    Integer block_height(int n, int k) const;      // h_{n,k} = h_n + spacers[k]
    Integer last_spacer(int n) const;              // s_{n, r_n - 1}
    // largest cut count among stages 0..upto
    int max_cut(int upto) const;

private:
    CutSpacerSpec() = default;
    void extend_locked(int n) const;

    std::string name_;
    std::optional<std::string> rule_name_;
    RuleFn rule_;
    int explicit_count_ = 0;
    std::optional<int> declared_sup_cuts_;

    struct Cache {
        std::mutex mu;
        std::vector<Stage> stages;
        std::vector<Integer> heights{Integer(1)};  // h_0 = 1
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// H_n: {0} together with the partial sums h_{n,0} + ... + h_{n,i} for
// i <= r_n - 2.  Exactly r_n elements.
SortedIntSet h_set(const CutSpacerSpec& spec, int n);

// Heights of the copies of `level` inside column m (level.stage <= m).
// Exactly finite, all elements in [0, h_m).
SortedIntSet descendant_set(const CutSpacerSpec& spec, const LevelId& level, int m);

// Stage-m return times of `level` seen through column m: the difference set of
// the descendant set with itself.  Certified on the window where deeper stages
// can contribute nothing new.
SortedIntSet conservative_set_trunc(const CutSpacerSpec& spec, const LevelId& level, int m);

// Positive block sums sum_{k=i}^{j} h_{m,k} for 0 <= i <= j <= r_m - 2, sorted.
std::vector<Integer> block_sums(const CutSpacerSpec& spec, int m);

// {0, +-B} over the stage-m block sums; the difference set H_m - H_m.
std::vector<Integer> step_layer(const CutSpacerSpec& spec, int m);

// One recursion step: given the stage-(m-1) return set, produce the stage-m
// one by adding the stage-(m-1) step layer.
SortedIntSet conservative_step(const CutSpacerSpec& spec, const SortedIntSet& prev, int m);

// Largest stage-m return time of the base of column 1: h_m - h_1 - sum of the
// last spacer of stages 1..m-1.
Integer max_return(const CutSpacerSpec& spec, int m);

enum class ConditionKind { thm41, cor_half, cor_telescoped };

struct StageCheck {
    int stage;
    bool holds;
    Integer lhs, rhs;  // the two sides of the inequality, exactly
};

// Per-stage report for the named growth condition.
//   thm41:          stages 2..upto,  h_n < 2(h_1 + s_{1,last} + ... + s_{n-1,last})
//                                        + min_{j<=r_n-2} s_{n,j} - 1
//   cor_half:       stages 1..upto,  2 s_{n-1,last} >= h_n
//   cor_telescoped: stages 1..upto,  h_{n+1} - h_n < 2 s_{n,last}
//                                        + min_j s_{n+1,j} - min_j s_{n,j}
std::vector<StageCheck> check_condition(const CutSpacerSpec& spec, ConditionKind kind, int upto);

// Least m >= level.stage such that every return entering after stage m has
// magnitude > window.  Uses the monotone lower bound
//   h_{level.stage} + sum_{k=level.stage}^{m-1} s_{k,last};
// throws NonTerminating when the bound fails to clear the window within
// stage_cap stages beyond the level's own.
int truncation_stage(const CutSpacerSpec& spec, const LevelId& level, const Integer& window,
                     int stage_cap = 64);

void validate_level(const CutSpacerSpec& spec, const LevelId& level);

}  // namespace rank1lab
