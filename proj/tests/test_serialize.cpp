#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "rank1lab/multipliers.hpp"
#include "rank1lab/serialize.hpp"

using namespace rank1lab;
using nlohmann::ordered_json;

namespace {

std::vector<Integer> ints(std::vector<long> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("spec round trip") {
    SUBCASE("explicit stages") {
        auto spec = CutSpacerSpec::skyscraper(ints({2, 6, 24}), "demo");
        auto j = spec_to_json(spec);
        REQUIRE(j.dump() ==
                "{\"name\":\"demo\",\"rule\":null,\"stages\":"
                "[{\"r\":2,\"spacers\":[0,0]},{\"r\":2,\"spacers\":[0,2]},"
                "{\"r\":2,\"spacers\":[0,12]}]}");
        auto back = spec_from_json(j);
        REQUIRE(back.name() == "demo");
        REQUIRE(back.heights(3) == ints({1, 2, 6, 24}));
        REQUIRE(back.explicit_stage_count() == 3);
        REQUIRE(spec_to_json(back).dump() == j.dump());
    }
    SUBCASE("preset by rule name") {
        auto j = spec_to_json(CutSpacerSpec::preset("hajian_kakutani"));
        REQUIRE(j.dump() ==
                "{\"name\":\"hajian_kakutani\",\"rule\":\"hajian_kakutani\",\"stages\":[]}");
        auto back = spec_from_json(j);
        REQUIRE(back.heights(3) == ints({1, 4, 16, 64}));
        REQUIRE(back.declared_sup_cuts() == 2);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(spec_from_json(parse_json_text(
                            R"({"name":"x","rule":null,"stages":[{"r":1,"spacers":[0]}]})")),
                        InvariantViolation);
        CHECK_THROWS_AS(spec_from_json(parse_json_text(R"({"name":"x","rule":null,"stages":[]})")),
                        ParseError);
        CHECK_THROWS_AS(spec_from_json(parse_json_text(R"({"rule":null,"stages":[]})")),
                        ParseError);
        CHECK_THROWS_AS(spec_from_json(parse_json_text(R"({"name":"x","rule":"nope","stages":[]})")),
                        UnknownPreset);
        CHECK_THROWS_AS(
            spec_from_json(parse_json_text(
                R"({"name":"x","rule":"hajian_kakutani","stages":[{"r":2,"spacers":[0,0]}]})")),
            ParseError);
        CHECK_THROWS_AS(parse_json_text("{"), ParseError);
        CHECK_THROWS_AS(spec_from_json(parse_json_text("[1,2]")), ParseError);
    }
}

TEST_CASE("sorted set round trip") {
    auto exact = SortedIntSet::from_elements(ints({-4, 0, 4}));
    REQUIRE(set_to_json(exact).dump() == "[-4,0,4]");
    auto b1 = set_from_json(set_to_json(exact));
    REQUIRE(b1 == exact);
    REQUIRE(b1.exactly_finite());

    auto bounded = SortedIntSet::from_elements(ints({-4, 0, 4}), Integer(84));
    REQUIRE(set_to_json(bounded).dump() == "{\"elements\":[-4,0,4],\"certified_bound\":84}");
    auto b2 = set_from_json(set_to_json(bounded));
    REQUIRE(b2 == bounded);
    REQUIRE(!b2.exactly_finite());
    REQUIRE(*b2.certified_bound() == 84);

    Integer big(1);
    for (int i = 0; i < 80; ++i) big *= 2;
    auto huge = SortedIntSet::from_elements({big});
    REQUIRE(set_to_json(huge).dump() == "[\"1208925819614629174706176\"]");
    REQUIRE(set_from_json(set_to_json(huge)).elements()[0] == big);

    CHECK_THROWS_AS(set_from_json(parse_json_text(R"({"elements":"x"})")), ParseError);
    CHECK_THROWS_AS(set_from_json(parse_json_text(R"([1.5])")), ParseError);
}

TEST_CASE("interval set round trip") {
    auto s = IntervalSet::from_intervals({{Rational(0), make_rational(Integer(1), Integer(2))},
                                          {make_rational(Integer(3), Integer(4)), Rational(1)}});
    auto j = intervals_to_json(s);
    REQUIRE(j.dump() == "[[0,1,1,2],[3,4,1,1]]");
    REQUIRE(intervals_from_json(j) == s);

    // touching pieces merge back into canonical form
    auto merged = intervals_from_json(parse_json_text("[[0,1,1,2],[1,2,1,1]]"));
    REQUIRE(merged.piece_count() == 1);
    REQUIRE(merged.measure() == 1);

    CHECK_THROWS_AS(intervals_from_json(parse_json_text("[[0,1,1]]")), ParseError);
    CHECK_THROWS_AS(intervals_from_json(parse_json_text("[[0,0,1,1]]")), ParseError);
    CHECK_THROWS_AS(intervals_from_json(parse_json_text("[[1,1,0,1]]")), ParseError);
}

TEST_CASE("certificate round trip re-verifies") {
    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    TowerGapOracle oracle(hk);
    auto cert = build_avoiding_skyscraper(oracle, 2);
    auto j = certificate_to_json(cert);
    REQUIRE(j.at("style").get<std::string>() == "skyscraper");
    REQUIRE(j.at("depth").get<int>() == 2);
    REQUIRE(j.at("target_ids").dump() == "[\"hajian_kakutani:1:0\"]");
    REQUIRE(j.at("heights").dump() == "[2,25]");

    auto back = certificate_from_json(j);
    REQUIRE(back.style == cert.style);
    REQUIRE(back.heights == cert.heights);
    REQUIRE(back.depth == cert.depth);
    REQUIRE(back.target_ids == cert.target_ids);
    REQUIRE(back.facts.size() == cert.facts.size());
    for (std::size_t i = 0; i < cert.facts.size(); ++i) {
        REQUIRE(back.facts[i].same_statement(cert.facts[i]));
        REQUIRE(back.facts[i].verified == cert.facts[i].verified);
    }
    REQUIRE(certificate_to_json(back).dump() == j.dump());

    TowerGapOracle fresh(hk);
    REQUIRE(verify_certificate(back, {&fresh}).ok);

    auto erg = build_ergodic(hk, 2);
    auto eback = certificate_from_json(certificate_to_json(erg));
    REQUIRE(eback.style == CertStyle::ergodic);
    REQUIRE(eback.heights == erg.heights);
    REQUIRE(verify_certificate(eback, hk).ok);

    CHECK_THROWS_AS(certificate_from_json(parse_json_text(R"({"style":"odd"})")), ParseError);
}

TEST_CASE("grid, zd certificate and point lists") {
    GridSpec g{2, ints({1, 2}), ints({2, 25})};
    auto j = grid_to_json(g);
    REQUIRE(j.dump() == "{\"d\":2,\"a\":[1,2],\"heights\":[2,25]}");
    auto back = grid_from_json(j);
    REQUIRE(back.d == 2);
    REQUIRE(back.direction == g.direction);
    REQUIRE(back.heights == g.heights);

    REQUIRE(points_to_json(zd_conservative_set(g, 2).materialize()).dump() ==
            "[[-2,-4],[-2,0],[-2,4],[0,-4],[0,0],[0,4],[2,-4],[2,0],[2,4]]");

    auto hk = CutSpacerSpec::preset("hajian_kakutani");
    auto target = ProductLatticeSet::from_axes(
        {conservative_set_trunc(hk, {1, 0}, 6), SortedIntSet::from_elements({Integer(0)})});
    auto cert = build_zd_skyscraper(target, ints({1, 2}), 2, "hk-x-origin");
    auto cj = zd_certificate_to_json(cert);
    auto cback = zd_certificate_from_json(cj);
    REQUIRE(cback.grid.heights == cert.grid.heights);
    REQUIRE(cback.target_id == cert.target_id);
    REQUIRE(cback.facts.size() == cert.facts.size());
    REQUIRE(zd_certificate_to_json(cback).dump() == cj.dump());
    REQUIRE(verify_zd_certificate(cback, target).ok);

    CHECK_THROWS_AS(grid_from_json(parse_json_text(R"({"d":2,"a":[1],"heights":[]})")),
                    ParseError);
}

TEST_CASE("files and csv") {
    const char* path = "serialize_test_tmp.json";
    auto spec = CutSpacerSpec::preset("infinite_chacon");
    save_json_file(path, spec_to_json(spec));
    auto loaded = spec_from_json(load_json_file(path));
    REQUIRE(loaded.heights(2) == ints({1, 8, 50}));
    std::remove(path);

    CHECK_THROWS_AS(load_json_file("no_such_file_here.json"), ParseError);
    {
        std::ofstream bad("serialize_bad_tmp.json");
        bad << "{\"name\": ";
    }
    CHECK_THROWS_AS(load_json_file("serialize_bad_tmp.json"), ParseError);
    std::remove("serialize_bad_tmp.json");

    REQUIRE(csv_ints(ints({1, 4, 16})) == "1\n4\n16\n");

    auto half = make_rational(Integer(1), Integer(2));
    auto l0 = IntervalSet::interval(Rational(0), half);
    auto l1 = IntervalSet::from_intervals({{half, make_rational(Integer(3), Integer(4))},
                                           {make_rational(Integer(7), Integer(8)), Rational(1)}});
    REQUIRE(csv_realization({l0, l1}) == "0,0,1/2\n1,1/2,3/4\n1,7/8,1\n");
}
