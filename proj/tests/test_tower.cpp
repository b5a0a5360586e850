#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "rank1lab/errors.hpp"
#include "rank1lab/tower.hpp"

using namespace rank1lab;

namespace {

std::vector<Integer> iv(std::initializer_list<long> xs) {
    std::vector<Integer> out;
    for (long x : xs) out.emplace_back(x);
    return out;
}

// Geometric oracle: realize column m as explicit interval positions and read
// descendants off containment.  Positions are tracked in units of the stage-m
// interval width, so level i of C_m sits at level_pos[i] * w_m.  Spacer
// intervals are taken from fresh territory past everything used so far.
struct Realized {
    std::vector<long long> level_pos;
    long long units = 1;  // 1/w_m
};

Realized realize(const CutSpacerSpec& spec, int m) {
    Realized cur;
    cur.level_pos = {0};
    for (int n = 0; n < m; ++n) {
        Stage st = spec.stage(n);
        long long h = static_cast<long long>(cur.level_pos.size());
        long long frontier = h * st.r;
        std::vector<long long> next;
        for (int k = 0; k < st.r; ++k) {
            for (long long i = 0; i < h; ++i) next.push_back(cur.level_pos[i] * st.r + k);
            long long s = *to_int64(st.spacers[k]);
            for (long long j = 0; j < s; ++j) next.push_back(frontier++);
        }
        cur.level_pos = std::move(next);
        cur.units *= st.r;
    }
    return cur;
}

std::vector<Integer> desc_oracle(const CutSpacerSpec& spec, const LevelId& level, int m) {
    Realized cn = realize(spec, level.stage);
    Realized cm = realize(spec, m);
    long long factor = cm.units / cn.units;
    long long lo = cn.level_pos[*to_int64(level.height)] * factor;
    long long hi = lo + factor;
    std::vector<Integer> out;
    for (size_t i = 0; i < cm.level_pos.size(); ++i)
        if (cm.level_pos[i] >= lo && cm.level_pos[i] < hi) out.emplace_back(static_cast<long>(i));
    return out;
}

std::vector<Integer> naive_diff(const std::vector<Integer>& a, const std::vector<Integer>& b) {
    std::set<Integer> acc;
    for (const auto& x : a)
        for (const auto& y : b) acc.insert(x - y);
    return {acc.begin(), acc.end()};
}

// Small random construction whose last spacer is a sizable fraction of the
// column height, so truncation windows close quickly.
CutSpacerSpec random_spec(std::mt19937& rng, int stages) {
    std::vector<Stage> st;
    Integer h = 1;
    for (int n = 0; n < stages; ++n) {
        Stage s;
        s.r = 2 + static_cast<int>(rng() % 2);
        Integer acc = h * s.r;
        for (int k = 0; k + 1 < s.r; ++k) {
            s.spacers.emplace_back(static_cast<long>(rng() % 3));
            acc += s.spacers.back();
        }
        Integer last = h / 2 + Integer(static_cast<long>(rng() % 4));
        if (last == 0) last = 1;
        s.spacers.push_back(last);
        h = acc + last;
        st.push_back(std::move(s));
    }
    return CutSpacerSpec::from_stages("random", std::move(st));
}

}  // namespace

TEST_CASE("preset heights match the published sequences") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK(hk.heights(5) == iv({1, 4, 16, 64, 256, 1024}));
    auto ic = CutSpacerSpec::preset("infinite_chacon");
    CHECK(ic.heights(5) == iv({1, 8, 50, 302, 1814, 10886}));
    CHECK(hk.declared_sup_cuts() == 2);
    CHECK(ic.declared_sup_cuts() == 3);
    CHECK_THROWS_AS(CutSpacerSpec::preset("nope"), UnknownPreset);
}

TEST_CASE("stage access and validation") {
    auto ic = CutSpacerSpec::preset("infinite_chacon");
    Stage s1 = ic.stage(1);
    CHECK(s1.r == 3);
    CHECK(s1.spacers == iv({0, 1, 25}));
    CHECK(ic.block_height(1, 2) == 33);
    CHECK(ic.last_spacer(0) == 4);

    auto finite = CutSpacerSpec::from_stages("f", {Stage{2, iv({0, 2})}});
    CHECK_THROWS_AS(finite.stage(1), MissingStage);
    try {
        finite.stage(3);
        CHECK(false);
    } catch (const MissingStage& e) {
        CHECK(e.stage == 3);
    }
    CHECK_THROWS_AS(CutSpacerSpec::from_stages("bad", {Stage{1, iv({0})}}), std::invalid_argument);
    CHECK_THROWS_AS(CutSpacerSpec::from_stages("bad", {Stage{2, iv({0})}}), std::invalid_argument);
    CHECK_THROWS_AS(CutSpacerSpec::from_stages("bad", {Stage{2, iv({0, -1})}}),
                    std::invalid_argument);

    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK_THROWS_AS(validate_level(hk, LevelId{1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(validate_level(hk, LevelId{1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(validate_level(hk, LevelId{-1, 0}), std::invalid_argument);
    CHECK_NOTHROW(validate_level(hk, LevelId{1, 3}));
}

TEST_CASE("h_set lists the subcolumn base offsets") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK(hk.stage(0).spacers == iv({0, 2}));
    CHECK(h_set(hk, 1).elements() == iv({0, 4}));
    CHECK(h_set(hk, 2).elements() == iv({0, 16}));

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    CHECK(h_set(ic, 0).elements() == iv({0, 1, 3}));
    CHECK(h_set(ic, 1).elements() == iv({0, 8, 17}));
    CHECK(h_set(ic, 2).elements() == iv({0, 50, 101}));

    // r_n offsets per stage, one per subcolumn
    std::mt19937 rng(99);
    for (int t = 0; t < 20; ++t) {
        auto sp = random_spec(rng, 5);
        for (int n = 0; n < 5; ++n)
            CHECK(h_set(sp, n).size() == static_cast<size_t>(sp.stage(n).r));
    }
}

TEST_CASE("descendant heights agree with geometric containment") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK(descendant_set(hk, LevelId{1, 0}, 3).elements() == iv({0, 4, 16, 20}));
    CHECK(descendant_set(hk, LevelId{1, 0}, 1).elements() == iv({0}));
    CHECK(descendant_set(hk, LevelId{1, 2}, 2).elements() == iv({2, 6}));

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    CHECK(descendant_set(ic, LevelId{1, 0}, 2).elements() == iv({0, 8, 17}));

    std::mt19937 rng(7);
    for (int t = 0; t < 25; ++t) {
        auto sp = random_spec(rng, 4);
        int n = static_cast<int>(rng() % 3);
        int m = n + static_cast<int>(rng() % (4 - n) + 1);
        Integer hn = sp.height(n);
        LevelId lvl{n, Integer(static_cast<long>(rng() % *to_int64(hn)))};
        auto got = descendant_set(sp, lvl, m);
        CHECK(got.elements() == desc_oracle(sp, lvl, m));
        CHECK(got.exactly_finite());
        for (const auto& d : got.elements()) {
            CHECK(d >= 0);
            CHECK(d < sp.height(m));
        }
    }
}

TEST_CASE("truncated return sets are descendant differences with a certified window") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto c2 = conservative_set_trunc(hk, LevelId{1, 0}, 2);
    CHECK(c2.elements() == iv({-4, 0, 4}));
    CHECK(c2.certified_bound() == Integer(11));
    CHECK(c2.contains(4));
    CHECK_FALSE(c2.contains(5));
    CHECK_FALSE(c2.contains(-11));
    CHECK_THROWS_AS(c2.contains(12), InsufficientTruncation);

    auto c3 = conservative_set_trunc(hk, LevelId{1, 0}, 3);
    CHECK(c3.elements() == iv({-20, -16, -12, -4, 0, 4, 12, 16, 20}));
    CHECK(c3.certified_bound() == Integer(43));

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    auto ic2 = conservative_set_trunc(ic, LevelId{1, 0}, 2);
    CHECK(ic2.elements() == iv({-17, -9, -8, 0, 8, 9, 17}));
    CHECK(ic2.certified_bound() == Integer(32));

    // same stage as the level: only the zero return, certified below h_n
    auto c1 = conservative_set_trunc(hk, LevelId{1, 2}, 1);
    CHECK(c1.elements() == iv({0}));
    CHECK(c1.certified_bound() == Integer(3));

    std::mt19937 rng(21);
    for (int t = 0; t < 25; ++t) {
        auto sp = random_spec(rng, 4);
        int n = 1 + static_cast<int>(rng() % 2);
        int m = n + static_cast<int>(rng() % (4 - n) + 1);
        LevelId lvl{n, Integer(static_cast<long>(rng() % *to_int64(sp.height(n))))};
        auto d = desc_oracle(sp, lvl, m);
        CHECK(conservative_set_trunc(sp, lvl, m).elements() == naive_diff(d, d));
    }
}

TEST_CASE("certified window is authoritative for the full return set") {
    // Every return inside the certified window must already be present at the
    // truncation stage: deeper columns add nothing that small.
    std::mt19937 rng(33);
    for (int t = 0; t < 20; ++t) {
        auto sp = random_spec(rng, 12);
        int n = 1 + static_cast<int>(rng() % 2);
        LevelId lvl{n, Integer(static_cast<long>(rng() % *to_int64(sp.height(n))))};
        Integer window(static_cast<long>(rng() % 26));
        int m = truncation_stage(sp, lvl, window);
        REQUIRE(m >= n);
        if (sp.height(m + 2) > 60000) continue;  // keep the oracle cheap
        auto at_m = conservative_set_trunc(sp, lvl, m);
        CHECK(at_m.certified_bound().value() >= window);
        auto deep = desc_oracle(sp, lvl, m + 2);
        auto deep_diff = naive_diff(deep, deep);
        for (const auto& x : deep_diff)
            if (int_abs(x) <= window) CHECK(std::binary_search(at_m.elements().begin(),
                                                               at_m.elements().end(), x));
        for (const auto& x : at_m.elements())
            CHECK(std::binary_search(deep_diff.begin(), deep_diff.end(), x));
    }
}

TEST_CASE("truncation stage picks the least sufficient column") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    LevelId base1{1, 0};
    CHECK(truncation_stage(hk, base1, 4) == 2);
    CHECK(truncation_stage(hk, base1, 100) == 4);
    CHECK(truncation_stage(hk, base1, 0) == 1);
    CHECK(truncation_stage(hk, LevelId{2, 5}, 0) == 2);

    // without spacers the window never closes
    auto odo = CutSpacerSpec::with_rule("odometer", "dyadic",
                                        [](int, const Integer&) { return Stage{2, {0, 0}}; });
    CHECK(truncation_stage(odo, LevelId{1, 0}, 0) == 1);
    CHECK_THROWS_AS(truncation_stage(odo, LevelId{1, 0}, 2), NonTerminating);
    CHECK_THROWS_AS(truncation_stage(odo, LevelId{1, 0}, 2, 8), NonTerminating);
}

TEST_CASE("step layers are the stage offset differences") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK(block_sums(hk, 2) == iv({16}));
    CHECK(step_layer(hk, 2) == iv({-16, 0, 16}));

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    CHECK(block_sums(ic, 1) == iv({8, 9, 17}));
    CHECK(step_layer(ic, 1) == iv({-17, -9, -8, 0, 8, 9, 17}));

    std::mt19937 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto sp = random_spec(rng, 4);
        int m = static_cast<int>(rng() % 4);
        auto hs = h_set(sp, m).elements();
        CHECK(step_layer(sp, m) == naive_diff(hs, hs));
        auto bs = block_sums(sp, m);
        CHECK(std::is_sorted(bs.begin(), bs.end()));
        for (const auto& b : bs) CHECK(b > 0);
    }
}

TEST_CASE("stepping the recursion reproduces the truncated sets") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto c2 = conservative_set_trunc(hk, LevelId{1, 0}, 2);
    auto c3 = conservative_step(hk, c2, 3);
    CHECK(c3.elements() == iv({-20, -16, -12, -4, 0, 4, 12, 16, 20}));

    std::mt19937 rng(11);
    for (int t = 0; t < 15; ++t) {
        auto sp = random_spec(rng, 5);
        int n = 1 + static_cast<int>(rng() % 2);
        LevelId lvl{n, Integer(static_cast<long>(rng() % *to_int64(sp.height(n))))};
        SortedIntSet cur = SortedIntSet::from_elements({Integer(0)});
        for (int m = n + 1; m <= 5; ++m) {
            cur = conservative_step(sp, cur, m);
            CHECK(cur == conservative_set_trunc(sp, lvl, m));
        }
    }
}

TEST_CASE("largest return of the first base has a closed form") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    CHECK(max_return(hk, 1) == 0);
    CHECK(max_return(hk, 2) == 4);
    CHECK(max_return(hk, 3) == 20);
    CHECK(max_return(hk, 5) == 340);

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    CHECK(max_return(ic, 2) == 17);
    CHECK(max_return(ic, 3) == 118);

    std::mt19937 rng(17);
    for (int t = 0; t < 15; ++t) {
        auto sp = random_spec(rng, 5);
        for (int m = 1; m <= 5; ++m) {
            auto c = conservative_set_trunc(sp, LevelId{1, 0}, m);
            CHECK(max_return(sp, m) == c.elements().back());
        }
    }
}

TEST_CASE("growth conditions evaluate with exact sides") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto t41 = check_condition(hk, ConditionKind::thm41, 4);
    REQUIRE(t41.size() == 3);
    CHECK(t41[0].stage == 2);
    CHECK(t41[0].holds);
    CHECK(t41[0].lhs == 16);
    CHECK(t41[0].rhs == 23);
    CHECK(t41[1].lhs == 64);
    CHECK(t41[1].rhs == 87);
    for (const auto& c : t41) CHECK(c.holds == (c.lhs < c.rhs));

    auto half = check_condition(hk, ConditionKind::cor_half, 3);
    REQUIRE(half.size() == 3);
    CHECK(half[0].stage == 1);
    CHECK(half[0].lhs == 4);
    CHECK(half[0].rhs == 4);
    CHECK(half[0].holds);

    auto ic = CutSpacerSpec::preset("infinite_chacon");
    auto tel = check_condition(ic, ConditionKind::cor_telescoped, 2);
    REQUIRE(tel.size() == 2);
    CHECK(tel[0].stage == 1);
    CHECK(tel[0].lhs == 42);
    CHECK(tel[0].rhs == 50);
    CHECK(tel[0].holds);
    auto ic41 = check_condition(ic, ConditionKind::thm41, 2);
    CHECK(ic41[0].lhs == 50);
    CHECK(ic41[0].rhs == 65);
    CHECK(ic41[0].holds);
}

TEST_CASE("telescoped condition forces the direct one") {
    std::mt19937 rng(71);
    int forced = 0;
    for (int t = 0; t < 60; ++t) {
        auto sp = random_spec(rng, 7);
        auto tel = check_condition(sp, ConditionKind::cor_telescoped, 5);
        auto dir = check_condition(sp, ConditionKind::thm41, 6);
        for (int n = 2; n <= 6; ++n) {
            bool prefix = true;
            for (int j = 1; j < n; ++j) prefix = prefix && tel[j - 1].holds;
            if (prefix) {
                CHECK(dir[n - 2].holds);
                ++forced;
            }
        }
    }
    CHECK(forced > 0);
}

TEST_CASE("doubling heights build a two cut construction") {
    auto sky = CutSpacerSpec::skyscraper({Integer(4), Integer(16), Integer(64), Integer(256)});
    CHECK(sky.heights(4) == iv({1, 4, 16, 64, 256}));
    CHECK(sky.stage(0).spacers == iv({0, 2}));
    CHECK(sky.stage(1).spacers == iv({0, 8}));
    CHECK(sky.declared_sup_cuts() == 2);

    // matches the equal-height preset stage for stage
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    for (int n = 0; n < 4; ++n) {
        CHECK(sky.stage(n).r == hk.stage(n).r);
        CHECK(sky.stage(n).spacers == hk.stage(n).spacers);
    }

    // return sets are the signed subset sums of the heights
    auto sk2 = CutSpacerSpec::skyscraper({Integer(2), Integer(5), Integer(11), Integer(30)});
    CHECK(sk2.heights(4) == iv({1, 2, 5, 11, 30}));
    for (int m = 1; m <= 4; ++m) {
        std::vector<Integer> gens, ones;
        for (int j = 1; j < m; ++j) {
            gens.push_back(sk2.height(j));
            ones.emplace_back(1);
        }
        CHECK(conservative_set_trunc(sk2, LevelId{1, 0}, m) == signed_sums(gens, ones));
    }

    CHECK_THROWS_AS(CutSpacerSpec::skyscraper({Integer(1)}), std::invalid_argument);
    CHECK_THROWS_AS(CutSpacerSpec::skyscraper({Integer(4), Integer(7)}), std::invalid_argument);
    CHECK_THROWS_AS(CutSpacerSpec::skyscraper({}), std::invalid_argument);
}

TEST_CASE("rule extension is memoized consistently") {
    int calls = 0;
    auto sp = CutSpacerSpec::with_rule(
        "counted", "double_spacer",
        [&calls](int, const Integer& h) {
            ++calls;
            return Stage{2, {Integer(0), 2 * h}};
        },
        {}, 2);
    CHECK(sp.height(3) == 64);
    int after_first = calls;
    CHECK(sp.stage(2).spacers == iv({0, 32}));
    CHECK(sp.height(3) == 64);
    CHECK(calls == after_first);
    CHECK(sp.max_cut(2) == 2);

    // explicit prefix wins over the rule
    auto mixed = CutSpacerSpec::with_rule(
        "mixed", "fill",
        [](int, const Integer& h) { return Stage{2, {Integer(0), 2 * h}}; },
        {Stage{3, iv({1, 1, 1})}});
    CHECK(mixed.stage(0).r == 3);
    CHECK(mixed.height(1) == 6);
    CHECK(mixed.stage(1).spacers == iv({0, 12}));
}
