#include <catch2/catch_amalgamated.hpp>

#include "equikh/diagram.hpp"

using namespace equikh;

// Braid-closure codes used across the test suite (see also the CLI corpus).
static const char* kTrefoilSpec = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]";
static const char* kTrefoil = "PD[X[2,1,3,4],X[4,3,5,6],X[6,5,1,2]]";
static const char* kHopf = "PD[X[2,1,3,4],X[4,3,1,2]]";
static const char* kUnknotPos = "PD[X[2,1,1,2]]";
static const char* kUnknotNeg = "PD[X[1,1,2,2]]";

TEST_CASE("pd parsing and signs") {
    SECTION("one-crossing unknot with subdivided arcs") {
        auto d = LinkDiagram::parse_pd("PD[X[1,4,2,3]]");
        REQUIRE(d.n() == 1);
        REQUIRE(d.components() == 1);
        REQUIRE(std::abs(d.writhe()) == 1);
    }
    SECTION("standard right-handed trefoil code has writhe +3") {
        auto d = LinkDiagram::parse_pd(kTrefoilSpec);
        REQUIRE(d.n() == 3);
        REQUIRE(d.components() == 1);
        REQUIRE(d.writhe() == 3);
    }
    SECTION("braid-closure trefoil agrees") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        REQUIRE(d.components() == 1);
        REQUIRE(d.writhe() == 3);
    }
    SECTION("malformed input is rejected") {
        REQUIRE_THROWS_AS(LinkDiagram::parse_pd("PD[X[1,4,2]]"), DiagramError);
        REQUIRE_THROWS_AS(LinkDiagram::parse_pd("PD[X[1,1,1,2]]"), DiagramError);
        REQUIRE_THROWS_AS(LinkDiagram::parse_pd("PD[X[1,2,3,4],X[1,2,3,4],X[1,2,3,4]]"),
                          DiagramError);
    }
    SECTION("hopf link") {
        auto d = LinkDiagram::parse_pd(kHopf);
        REQUIRE(d.n() == 2);
        REQUIRE(d.components() == 2);
        REQUIRE(d.writhe() == 2);
    }
    SECTION("positive and negative kinks") {
        REQUIRE(LinkDiagram::parse_pd(kUnknotPos).writhe() == 1);
        REQUIRE(LinkDiagram::parse_pd(kUnknotNeg).writhe() == -1);
    }
}

TEST_CASE("mirror") {
    auto d = LinkDiagram::parse_pd(kTrefoilSpec);
    auto m = d.mirror();
    REQUIRE(m.writhe() == -3);
    REQUIRE(m.components() == 1);
    auto mm = m.mirror();
    REQUIRE(mm.writhe() == 3);
    REQUIRE(mm.pd_string() == d.pd_string());
    SECTION("one-crossing unknots swap") {
        REQUIRE(LinkDiagram::parse_pd(kUnknotPos).mirror().writhe() == -1);
    }
}

TEST_CASE("resolutions") {
    SECTION("one-crossing unknot: the two smoothings differ by one circle") {
        auto d = LinkDiagram::parse_pd(kUnknotNeg);
        auto r0 = d.resolve({0});
        auto r1 = d.resolve({1});
        long diff = static_cast<long>(r0.circles.size()) - static_cast<long>(r1.circles.size());
        REQUIRE(std::abs(diff) == 1);
        // Hand trace: the 0-smoothing of the negative kink keeps one circle.
        REQUIRE(r0.circles.size() == 1);
        REQUIRE(r1.circles.size() == 2);
    }
    SECTION("wrong word length") {
        auto d = LinkDiagram::parse_pd(kUnknotNeg);
        REQUIRE_THROWS_AS(d.resolve({0, 1}), DiagramError);
    }
    SECTION("trefoil oriented resolution is the all-zero word with 2 circles") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        auto w = d.oriented_word();
        REQUIRE(w == std::vector<std::uint8_t>{0, 0, 0});
        REQUIRE(d.seifert_circle_count() == 2);
    }
    SECTION("one-crossing unknot has 2 Seifert circles") {
        REQUIRE(LinkDiagram::parse_pd(kUnknotPos).seifert_circle_count() == 2);
        REQUIRE(LinkDiagram::parse_pd(kUnknotNeg).seifert_circle_count() == 2);
    }
    SECTION("crossingless unknots") {
        auto d = LinkDiagram::unknots(1);
        REQUIRE(d.seifert_circle_count() == 1);
        REQUIRE(LinkDiagram::unknots(2).seifert_circle_count() == 2);
    }
    SECTION("arc count is preserved by every resolution") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        for (std::uint8_t a : {0, 1})
            for (std::uint8_t b : {0, 1})
                for (std::uint8_t c : {0, 1}) {
                    auto r = d.resolve({a, b, c});
                    std::size_t arcs = 0;
                    for (auto& circ : r.circles) arcs += circ.size();
                    REQUIRE(arcs == d.edge_labels().size());
                    REQUIRE(r.circles.size() >= 1);
                }
    }
}

TEST_CASE("checkerboard labels") {
    SECTION("crossingless unknot: ccw is A, cw is B") {
        auto ccw = LinkDiagram::unknots(1, {true});
        auto cw = LinkDiagram::unknots(1, {false});
        REQUIRE(ccw.checkerboard_labels() == std::vector<CircleTag>{CircleTag::A});
        REQUIRE(cw.checkerboard_labels() == std::vector<CircleTag>{CircleTag::B});
    }
    SECTION("trefoil Seifert circles receive distinct labels") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        auto tags = d.checkerboard_labels();
        REQUIRE(tags.size() == 2);
        REQUIRE(tags[0] != tags[1]);
    }
    SECTION("orientation reversal swaps every label") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        std::uint32_t all = (1u << d.components()) - 1;
        auto t0 = d.checkerboard_labels(0);
        auto t1 = d.checkerboard_labels(all);
        REQUIRE(t0.size() == t1.size());
        for (std::size_t i = 0; i < t0.size(); ++i) REQUIRE(t0[i] != t1[i]);
    }
    SECTION("hopf link: reversing one component changes the oriented word") {
        auto d = LinkDiagram::parse_pd(kHopf);
        REQUIRE(d.oriented_word(0) == std::vector<std::uint8_t>{0, 0});
        REQUIRE(d.oriented_word(1) == std::vector<std::uint8_t>{1, 1});
    }
    SECTION("based labels mark the based circle A") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        for (long bp : d.edge_labels()) {
            auto res = d.oriented_resolution();
            auto tags = d.checkerboard_labels(0, bp);
            REQUIRE(tags[static_cast<std::size_t>(res.circle_of_edge.at(bp))] == CircleTag::A);
        }
    }
    SECTION("left region is circle-wise consistent") {
        for (const char* pd : {kTrefoil, kTrefoilSpec, kHopf, kUnknotPos, kUnknotNeg}) {
            auto d = LinkDiagram::parse_pd(pd);
            REQUIRE(d.left_region_consistent(d.oriented_resolution(), 0));
        }
    }
    SECTION("basepoint must lie on the diagram") {
        auto d = LinkDiagram::parse_pd(kTrefoil);
        REQUIRE_THROWS_AS(d.set_basepoint(99), DiagramError);
    }
}

TEST_CASE("json round trip") {
    auto d = LinkDiagram::parse_pd(kHopf);
    d.set_basepoint(1);
    auto j = d.to_json();
    auto d2 = LinkDiagram::from_json(j);
    REQUIRE(d2.pd_string() == d.pd_string());
    REQUIRE(d2.basepoint() == d.basepoint());
    REQUIRE(d2.writhe() == 2);

    nlohmann::json junk = {{"crossings", {{{"edges", {2, 1, 3, 4}}, {"sign", 1}}}}};
    REQUIRE_THROWS_AS(LinkDiagram::from_json(junk), DiagramError);

    nlohmann::json two = {{"unknots", 2}};
    REQUIRE(LinkDiagram::from_json(two).components() == 2);
}
