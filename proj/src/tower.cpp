#include "rank1lab/tower.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

#include "rank1lab/errors.hpp"

namespace rank1lab {

namespace {

void validate_stage(const Stage& st, int index) {
    if (st.r < 2) throw std::invalid_argument("stage " + std::to_string(index) + ": need r >= 2");
    if (st.spacers.size() != static_cast<size_t>(st.r))
        throw std::invalid_argument("stage " + std::to_string(index) +
                                    ": one spacer count per subcolumn");
    for (const auto& s : st.spacers)
        if (s < 0) throw std::invalid_argument("stage " + std::to_string(index) +
                                               ": negative spacer count");
}

}  // namespace

CutSpacerSpec CutSpacerSpec::from_stages(std::string name, std::vector<Stage> stages) {
    CutSpacerSpec spec;
    spec.name_ = std::move(name);
    spec.explicit_count_ = static_cast<int>(stages.size());
    int sup = 0;
    for (int i = 0; i < spec.explicit_count_; ++i) {
        validate_stage(stages[i], i);
        sup = std::max(sup, stages[i].r);
    }
    if (sup > 0) spec.declared_sup_cuts_ = sup;
    spec.cache_->stages = std::move(stages);
    return spec;
}

CutSpacerSpec CutSpacerSpec::with_rule(std::string name, std::string rule_name, RuleFn rule,
                                       std::vector<Stage> prefix,
                                       std::optional<int> declared_sup_cuts) {
    if (!rule) throw std::invalid_argument("rule must be callable");
    CutSpacerSpec spec;
    spec.name_ = std::move(name);
    spec.rule_name_ = std::move(rule_name);
    spec.rule_ = std::move(rule);
    spec.explicit_count_ = static_cast<int>(prefix.size());
    for (int i = 0; i < spec.explicit_count_; ++i) validate_stage(prefix[i], i);
    spec.declared_sup_cuts_ = declared_sup_cuts;
    spec.cache_->stages = std::move(prefix);
    return spec;
}

CutSpacerSpec CutSpacerSpec::preset(const std::string& name) {
    if (name == "hajian_kakutani")
        return with_rule(name, name,
                         [](int, const Integer& h) {
                             return Stage{2, {Integer(0), Integer(2 * h)}};
                         },
                         {}, 2);
    if (name == "infinite_chacon")
        return with_rule(name, name,
                         [](int, const Integer& h) {
                             return Stage{3, {Integer(0), Integer(1), Integer(3 * h + 1)}};
                         },
                         {}, 3);
    throw UnknownPreset(name);
}

CutSpacerSpec CutSpacerSpec::skyscraper(std::vector<Integer> heights, std::string name) {
    if (heights.empty()) throw std::invalid_argument("need at least one height");
    if (heights[0] < 2) throw std::invalid_argument("first height must be at least 2");
    for (size_t i = 0; i + 1 < heights.size(); ++i)
        if (heights[i + 1] < 2 * heights[i])
            throw std::invalid_argument("each height must at least double the previous");
    std::vector<Stage> stages;
    Integer prev = 1;
    for (const auto& h : heights) {
        stages.push_back(Stage{2, {Integer(0), Integer(h - 2 * prev)}});
        prev = h;
    }
    return from_stages(std::move(name), std::move(stages));
}

void CutSpacerSpec::extend_locked(int n) const {
    auto& c = *cache_;
    while (static_cast<int>(c.stages.size()) <= n) {
        int i = static_cast<int>(c.stages.size());
        if (!rule_) throw MissingStage(i);
        while (static_cast<int>(c.heights.size()) <= i) {
            const Stage& st = c.stages[c.heights.size() - 1];
            Integer h = c.heights.back() * st.r;
            for (const auto& s : st.spacers) h += s;
            c.heights.push_back(h);
        }
        Stage st = rule_(i, c.heights[i]);
        validate_stage(st, i);
        c.stages.push_back(std::move(st));
    }
}

Stage CutSpacerSpec::stage(int n) const {
    if (n < 0) throw std::invalid_argument("stage index must be nonnegative");
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (n >= explicit_count_ && !rule_) throw MissingStage(n);
    extend_locked(n);
    return cache_->stages[n];
}

Integer CutSpacerSpec::height(int n) const {
    if (n < 0) throw std::invalid_argument("column index must be nonnegative");
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto& c = *cache_;
    if (n > 0) extend_locked(n - 1);
    while (static_cast<int>(c.heights.size()) <= n) {
        const Stage& st = c.stages[c.heights.size() - 1];
        Integer h = c.heights.back() * st.r;
        for (const auto& s : st.spacers) h += s;
        c.heights.push_back(h);
    }
    return c.heights[n];
}

std::vector<Integer> CutSpacerSpec::heights(int upto) const {
    std::vector<Integer> out;
    for (int n = 0; n <= upto; ++n) out.push_back(height(n));
    return out;
}

Integer CutSpacerSpec::block_height(int n, int k) const {
    Stage st = stage(n);
    if (k < 0 || k >= st.r) throw std::invalid_argument("subcolumn index out of range");
    return height(n) + st.spacers[k];
}

Integer CutSpacerSpec::last_spacer(int n) const { return stage(n).spacers.back(); }

int CutSpacerSpec::max_cut(int upto) const {
    int out = 0;
    for (int n = 0; n <= upto; ++n) out = std::max(out, stage(n).r);
    return out;
}

void validate_level(const CutSpacerSpec& spec, const LevelId& level) {
    if (level.stage < 0) throw std::invalid_argument("level stage must be nonnegative");
    if (level.height < 0 || level.height >= spec.height(level.stage))
        throw std::invalid_argument("level height outside its column");
}

SortedIntSet h_set(const CutSpacerSpec& spec, int n) {
    Stage st = spec.stage(n);
    Integer h = spec.height(n);
    std::vector<Integer> out{Integer(0)};
    Integer acc = 0;
    for (int k = 0; k + 1 < st.r; ++k) {
        acc += h + st.spacers[k];
        out.push_back(acc);
    }
    return SortedIntSet::from_elements(std::move(out));
}

SortedIntSet descendant_set(const CutSpacerSpec& spec, const LevelId& level, int m) {
    validate_level(spec, level);
    if (m < level.stage) throw std::invalid_argument("target column precedes the level's own");
    SortedIntSet cur = SortedIntSet::from_elements({level.height});
    for (int j = level.stage; j < m; ++j) cur = sumset(cur, h_set(spec, j));
    return cur;
}

SortedIntSet conservative_set_trunc(const CutSpacerSpec& spec, const LevelId& level, int m) {
    SortedIntSet d = descendant_set(spec, level, m);
    SortedIntSet diff = difference_set(d, d);
    // deeper stages only add returns of magnitude >= h_n + sum of last spacers
    Integer guard = spec.height(level.stage);
    for (int k = level.stage; k < m; ++k) guard += spec.last_spacer(k);
    return SortedIntSet::from_elements(diff.elements(), Integer(guard - 1));
}

std::vector<Integer> block_sums(const CutSpacerSpec& spec, int m) {
    Stage st = spec.stage(m);
    Integer h = spec.height(m);
    std::set<Integer> acc;
    for (int i = 0; i + 1 < st.r; ++i) {
        Integer run = 0;
        for (int j = i; j + 1 < st.r; ++j) {
            run += h + st.spacers[j];
            acc.insert(run);
        }
    }
    return {acc.begin(), acc.end()};
}

std::vector<Integer> step_layer(const CutSpacerSpec& spec, int m) {
    std::vector<Integer> pos = block_sums(spec, m);
    std::vector<Integer> out;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    out.emplace_back(0);
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

SortedIntSet conservative_step(const CutSpacerSpec& spec, const SortedIntSet& prev, int m) {
    if (m < 1) throw std::invalid_argument("step target must be at least column 1");
    SortedIntSet layer = SortedIntSet::from_elements(step_layer(spec, m - 1));
    SortedIntSet out = sumset(prev, layer);
    return SortedIntSet::from_elements(out.elements());
}

Integer max_return(const CutSpacerSpec& spec, int m) {
    if (m < 1) throw std::invalid_argument("defined for columns from 1 on");
    Integer out = spec.height(m) - spec.height(1);
    for (int k = 1; k < m; ++k) out -= spec.last_spacer(k);
    return out;
}

namespace {

// smallest spacer count among the subcolumns that keep a right neighbour
Integer min_front_spacer(const CutSpacerSpec& spec, int n) {
    Stage st = spec.stage(n);
    Integer out = st.spacers[0];
    for (int j = 1; j + 1 < st.r; ++j) out = std::min(out, st.spacers[j]);
    return out;
}

}  // namespace

std::vector<StageCheck> check_condition(const CutSpacerSpec& spec, ConditionKind kind, int upto) {
    std::vector<StageCheck> out;
    switch (kind) {
        case ConditionKind::thm41: {
            Integer tail = spec.height(1);  // h_1 + s_{1,last} + ... accumulates below
            for (int n = 2; n <= upto; ++n) {
                tail += spec.last_spacer(n - 1);
                Integer lhs = spec.height(n);
                Integer rhs = 2 * tail + min_front_spacer(spec, n) - 1;
                out.push_back(StageCheck{n, lhs < rhs, lhs, rhs});
            }
            break;
        }
        case ConditionKind::cor_half: {
            for (int n = 1; n <= upto; ++n) {
                Integer lhs = 2 * spec.last_spacer(n - 1);
                Integer rhs = spec.height(n);
                out.push_back(StageCheck{n, lhs >= rhs, lhs, rhs});
            }
            break;
        }
        case ConditionKind::cor_telescoped: {
            for (int n = 1; n <= upto; ++n) {
                Integer lhs = spec.height(n + 1) - spec.height(n);
                Integer rhs = 2 * spec.last_spacer(n) + min_front_spacer(spec, n + 1) -
                              min_front_spacer(spec, n);
                out.push_back(StageCheck{n, lhs < rhs, lhs, rhs});
            }
            break;
        }
    }
    return out;
}

int truncation_stage(const CutSpacerSpec& spec, const LevelId& level, const Integer& window,
                     int stage_cap) {
    validate_level(spec, level);
    if (window < 0) throw std::invalid_argument("window must be nonnegative");
    Integer bound = spec.height(level.stage);
    int m = level.stage;
    while (bound <= window) {
        if (m - level.stage >= stage_cap)
            throw NonTerminating("spacer growth too slow to close the window |x| <= " +
                                 to_string(window) + " within " + std::to_string(stage_cap) +
                                 " stages");
        bound += spec.last_spacer(m);
        ++m;
    }
    return m;
}

}  // namespace rank1lab
