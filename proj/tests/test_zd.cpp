#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "rank1lab/multipliers.hpp"
#include "rank1lab/tower.hpp"
#include "rank1lab/zd.hpp"

using namespace rank1lab;

namespace {

std::vector<Integer> ints(std::vector<long> xs) { return {xs.begin(), xs.end()}; }

// reference recursion: start at the origin, add one full sign-pattern layer
// per stage
std::set<std::vector<long>> brute_returns(const GridSpec& g, int m) {
    std::set<std::vector<long>> pts;
    pts.insert(std::vector<long>(static_cast<std::size_t>(g.d), 0));
    for (int stage = 1; stage < m; ++stage) {
        long h = to_int64(g.heights[static_cast<std::size_t>(stage) - 1]).value();
        std::set<std::vector<long>> next;
        for (const auto& p : pts) {
            std::vector<int> eps(static_cast<std::size_t>(g.d), -1);
            for (;;) {
                std::vector<long> q = p;
                for (int i = 0; i < g.d; ++i)
                    q[static_cast<std::size_t>(i)] +=
                        eps[static_cast<std::size_t>(i)] *
                        to_int64(g.direction[static_cast<std::size_t>(i)]).value() * h;
                next.insert(q);
                std::size_t i = 0;
                while (i < eps.size() && eps[i] == 1) eps[i++] = -1;
                if (i == eps.size()) break;
                ++eps[i];
            }
        }
        pts = std::move(next);
    }
    return pts;
}

std::set<std::vector<long>> as_longs(const std::vector<std::vector<Integer>>& pts) {
    std::set<std::vector<long>> out;
    for (const auto& p : pts) {
        std::vector<long> q;
        for (const auto& x : p) q.push_back(to_int64(x).value());
        out.insert(q);
    }
    return out;
}

ProductLatticeSet origin_target(int d) {
    std::vector<SortedIntSet> axes(static_cast<std::size_t>(d),
                                   SortedIntSet::from_elements({Integer(0)}));
    return ProductLatticeSet::from_axes(std::move(axes));
}

}  // namespace

TEST_CASE("product form equals the layered recursion") {
    GridSpec g{2, ints({1, 2}), ints({2, 5})};
    for (int m = 1; m <= 3; ++m) {
        auto prod = zd_conservative_set(g, m);
        REQUIRE(as_longs(prod.materialize()) == brute_returns(g, m));
    }
    auto c3 = zd_conservative_set(g, 3);
    REQUIRE(c3.point_count() == 81);
    REQUIRE(c3.contains({Integer(7), Integer(14)}));
    REQUIRE(c3.contains({Integer(-3), Integer(10)}));
    REQUIRE(!c3.contains({Integer(1), Integer(0)}));

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        int d = 1 + static_cast<int>(rng() % 3);
        GridSpec r;
        r.d = d;
        for (int i = 0; i < d; ++i) r.direction.push_back(Integer(1 + static_cast<long>(rng() % 3)));
        long h = 2 + static_cast<long>(rng() % 3);
        for (int j = 0; j < 3; ++j) {
            r.heights.push_back(Integer(h));
            h = 2 * h + static_cast<long>(rng() % 4);
        }
        int m = 2 + static_cast<int>(rng() % 3);
        REQUIRE(as_longs(zd_conservative_set(r, m).materialize()) == brute_returns(r, m));
    }
}

TEST_CASE("adequate gap scan, frozen values") {
    SUBCASE("origin target, diagonal direction") {
        auto t = origin_target(2);
        Integer l = find_adequate_gap(t, ints({1, 1}), ints({1, 1}), 1, 10, true);
        REQUIRE(l == 2);  // at l=1 the (1,0) box [0,2]x[-1,1] still holds the origin
    }
    SUBCASE("all boxes checked when nothing is exempt") {
        auto t = ProductLatticeSet::from_axes(
            {SortedIntSet::from_elements({Integer(5)}), SortedIntSet::from_elements({Integer(7)})});
        REQUIRE(find_adequate_gap(t, ints({1, 1}), ints({1, 1}), 1, 10, false) == 1);
    }
    SUBCASE("dense target exhausts the radius") {
        std::vector<Integer> all;
        for (long x = -20; x <= 20; ++x) all.push_back(Integer(x));
        auto axis = SortedIntSet::from_elements(all);
        auto t = ProductLatticeSet::from_axes({axis, axis});
        CHECK_THROWS_AS(find_adequate_gap(t, ints({1, 1}), ints({1, 1}), 1, 10, true),
                        SearchExhausted);
    }
    SUBCASE("bounded axis cannot decide past its certification") {
        auto axis = SortedIntSet::from_elements({Integer(0)}, Integer(10));
        auto t = ProductLatticeSet::from_axes({axis});
        CHECK_THROWS_AS(find_adequate_gap(t, ints({1}), ints({1}), 10, 50, true),
                        InsufficientTruncation);
    }
}

TEST_CASE("one-dimensional build coincides with the skyscraper builder") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto trunc = conservative_set_trunc(hk, {1, 0}, 6);
    auto target = ProductLatticeSet::from_axes({trunc});
    auto cert = build_zd_skyscraper(target, ints({1}), 4, "hk-line");
    REQUIRE(cert.grid.d == 1);
    REQUIRE(cert.grid.heights == ints({2, 25, 115, 487}));
    REQUIRE(cert.depth == 4);
    REQUIRE(cert.target_id == "hk-line");

    TowerGapOracle oracle(hk);
    auto one_d = build_avoiding_skyscraper(oracle, 4);
    REQUIRE(cert.grid.heights == one_d.heights);

    REQUIRE(verify_zd_certificate(cert, target).ok);
}

TEST_CASE("two-dimensional build, frozen heights and axis facts") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto trunc = conservative_set_trunc(hk, {1, 0}, 6);
    auto target =
        ProductLatticeSet::from_axes({trunc, SortedIntSet::from_elements({Integer(0)})});
    auto cert = build_zd_skyscraper(target, ints({1, 2}), 2, "hk-x-origin");
    REQUIRE(cert.grid.heights == ints({2, 25}));
    REQUIRE(cert.grid.direction == ints({1, 2}));
    REQUIRE(cert.facts.size() == 4);  // two rounds, two closing axis facts

    const Fact* ax1 = nullptr;
    const Fact* ax2 = nullptr;
    for (const auto& f : cert.facts)
        if (f.kind == "zd_axis_avoidance") {
            if (!ax1)
                ax1 = &f;
            else
                ax2 = &f;
        }
    REQUIRE(ax1 != nullptr);
    REQUIRE(ax2 != nullptr);
    REQUIRE(ax1->operands.at("axis").get<int>() == 1);
    std::vector<long> r1;
    for (const auto& v : ax1->operands.at("returns")) r1.push_back(v.get<long>());
    REQUIRE(r1 == std::vector<long>({-27, -25, -23, -2, 0, 2, 23, 25, 27}));
    std::vector<long> r2;
    for (const auto& v : ax2->operands.at("returns")) r2.push_back(v.get<long>());
    REQUIRE(r2 == std::vector<long>({-54, -50, -46, -4, 0, 4, 46, 50, 54}));

    REQUIRE(verify_zd_certificate(cert, target).ok);
    auto bad = cert;
    bad.grid.heights[1] += 1;
    auto rep = verify_zd_certificate(bad, target);
    REQUIRE(!rep.ok);
    REQUIRE(!rep.failures.empty());
}

TEST_CASE("syndetic axis stalls the build") {
    std::vector<Integer> mult3;
    for (long x = -60; x <= 60; x += 3) mult3.push_back(Integer(x));
    auto target = ProductLatticeSet::from_axes({SortedIntSet::from_elements(mult3, Integer(60))});
    try {
        build_zd_skyscraper(target, ints({1}), 2, "mod3-line");
        FAIL("expected a stall");
    } catch (const ZdConstructionStalled& e) {
        REQUIRE(e.stage_reached == 1);
        REQUIRE(e.partial.grid.heights.empty());
    }
}

TEST_CASE("grid and product validation") {
    CHECK_THROWS_AS(validate_grid(GridSpec{0, {}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_grid(GridSpec{2, ints({1}), ints({2})}), std::invalid_argument);
    CHECK_THROWS_AS(validate_grid(GridSpec{1, ints({0}), ints({2})}), std::invalid_argument);
    CHECK_THROWS_AS(validate_grid(GridSpec{1, ints({1}), ints({3, 3})}), std::invalid_argument);
    CHECK_NOTHROW(validate_grid(GridSpec{2, ints({1, 3}), ints({2, 5, 11})}));

    CHECK_THROWS_AS(ProductLatticeSet::from_axes({}), std::invalid_argument);
    CHECK_THROWS_AS(zd_conservative_set(GridSpec{1, ints({1}), ints({2})}, 3),
                    std::invalid_argument);

    // 101^3 > the materialize cap
    std::vector<Integer> big;
    for (long x = -50; x <= 50; ++x) big.push_back(Integer(x));
    auto axis = SortedIntSet::from_elements(big);
    auto huge = ProductLatticeSet::from_axes({axis, axis, axis});
    REQUIRE(huge.point_count() == 1030301);
    CHECK_THROWS_AS(huge.materialize(), std::invalid_argument);

    CHECK_THROWS_AS(origin_target(2).contains({Integer(0)}), std::invalid_argument);
}
