#include <catch2/catch_amalgamated.hpp>

#include "equikh/pipeline.hpp"
#include "equikh/scan.hpp"

using namespace equikh;

static const char* kTrefoil = "PD[X[2,1,3,4],X[4,3,5,6],X[6,5,1,2]]";
static const char* kUnknotPos = "PD[X[2,1,1,2]]";
static const char* kUnknotNeg = "PD[X[1,1,2,2]]";

TEST_CASE("gr_t of chains") {
    using PQ = Poly<Rational>;
    auto cube = build_cube<Rational>(LinkDiagram::unknots(1));
    SECTION("U*1 at t=1/2 sits at 1 - 1/2") {
        SparseChain<Rational> z{{0, PQ::U()}};
        REQUIRE(grt_of_chain(cube.C, 0, z, RatQ(1, 2)) == RatQ(1, 2));
    }
    SECTION("minimum over summands") {
        SparseChain<Rational> z{{0, PQ::U()}, {1, PQ::one()}}; // U*1 + X
        REQUIRE(grt_of_chain(cube.C, 0, z, RatQ(1, 2)) == RatQ(-1));
        REQUIRE_FALSE(grt_of_chain(cube.C, 0, {}, RatQ(1)).has_value());
    }
}

TEST_CASE("truncations of the crossingless unknot") {
    auto cube = build_cube<Rational>(LinkDiagram::unknots(1));
    SECTION("t=1, lambda=1 keeps only the generator 1") {
        auto tr = truncate(cube.C, 0, RatQ(1), RatQ(1));
        REQUIRE(tr.size() == 1);
        REQUIRE(tr.items[0].gen == 0);
        REQUIRE(tr.items[0].m == 0);
        REQUIRE(tr.items[0].n == 0);
    }
    SECTION("t=1, lambda=-1 keeps the seven lattice points with gr_1 >= -1") {
        // 1, U*1, V*1, U^2*1, UV*1, V^2*1 and X
        auto tr = truncate(cube.C, 0, RatQ(1), RatQ(-1));
        REQUIRE(tr.size() == 7);
        for (auto& it : tr.items) {
            int q = cube.C.grq[0][static_cast<std::size_t>(it.gen)];
            REQUIRE(grt_of_point(it.m, it.n, q, RatQ(1)) >= RatQ(-1));
        }
    }
    SECTION("above the maximal grading the truncation is empty") {
        REQUIRE(truncate(cube.C, 0, RatQ(1), RatQ(2)).empty());
    }
    SECTION("endpoints require a cap") {
        REQUIRE_THROWS_AS(truncate(cube.C, 0, RatQ(0), RatQ(0)), std::invalid_argument);
        auto tr = truncate(cube.C, 0, RatQ(0), RatQ(-1), 2);
        // gr_0 = grq - 2n: items (1; n=0,1 with m<=2) and (X; n=0 with m<=2)
        REQUIRE(tr.size() == 9);
    }
}

TEST_CASE("s_t of small diagrams, full-cube pipeline") {
    SECTION("unknots: 0 at interior grid points and stable endpoints") {
        for (auto D : {LinkDiagram::unknots(1), LinkDiagram::parse_pd(kUnknotPos),
                       LinkDiagram::parse_pd(kUnknotNeg)}) {
            auto e = make_engine<F2>(D, PipelineMode::Cube, false);
            REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(0));
            REQUIRE(e.value_at(RatQ(1)) == RatQ(0));
            auto end0 = e.value_at_endpoint(0);
            REQUIRE(end0.value == RatQ(0));
            REQUIRE(end0.stable);
        }
    }
    SECTION("right-handed trefoil: s_t = 2") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        auto e = make_engine<F2>(D, PipelineMode::Cube, false);
        REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(2));
        REQUIRE(e.value_at(RatQ(1)) == RatQ(2));
        REQUIRE(e.value_at(RatQ(7, 8)) == RatQ(2));
        auto end0 = e.value_at_endpoint(0);
        REQUIRE(end0.value == RatQ(2));
        REQUIRE(end0.stable);
    }
    SECTION("trefoil over Q matches F2") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        auto e = make_engine<Rational>(D, PipelineMode::Cube, false);
        REQUIRE(e.value_at(RatQ(1)) == RatQ(2));
    }
    SECTION("disjoint union with an unknot adds one") {
        auto j = LinkDiagram::parse_pd(kTrefoil).to_json();
        j["unknots"] = 1;
        auto D = LinkDiagram::from_json(j);
        REQUIRE(D.components() == 2);
        auto e = make_engine<F2>(D, PipelineMode::Cube, false);
        REQUIRE(e.value_at(RatQ(1)) == RatQ(3));
        REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(3));
    }
    SECTION("profile sweep of the trefoil is constant 2 and symmetric") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        auto e = make_engine<F2>(D, PipelineMode::Cube, false, 4);
        auto prof = e.sweep();
        REQUIRE(prof.values.size() == 9);
        for (auto& v : prof.values) REQUIRE(v == RatQ(2));
        REQUIRE(prof.symmetric);
        REQUIRE(prof.rational_values);
        REQUIRE(prof.stable_at_0);
        REQUIRE(prof.stable_at_2);
    }
}

TEST_CASE("reduced invariant s~_t") {
    SECTION("based crossingless unknot: 0 everywhere") {
        auto D = LinkDiagram::unknots(1);
        D.set_basepoint(D.bare_label(0));
        auto e = make_engine<F2>(D, PipelineMode::Cube, true);
        REQUIRE(e.value_at(RatQ(1)) == RatQ(0));
        REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(0));
        auto end = e.value_at_endpoint(0);
        REQUIRE(end.value == RatQ(0));
    }
    SECTION("two based unknot diagrams agree") {
        auto D1 = LinkDiagram::parse_pd(kUnknotNeg);
        D1.set_basepoint(1);
        auto e1 = make_engine<F2>(D1, PipelineMode::Cube, true);
        for (auto t : {RatQ(1, 2), RatQ(1), RatQ(3, 2)})
            REQUIRE(e1.value_at(t) == RatQ(0));
    }
    SECTION("trefoil bound s~_t <= s_t + 2") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        D.set_basepoint(1);
        auto er = make_engine<F2>(D, PipelineMode::Cube, true);
        auto eu = make_engine<F2>(D, PipelineMode::Cube, false);
        for (auto t : {RatQ(1, 2), RatQ(1)})
            REQUIRE(er.value_at(t) <= eu.value_at(t) + RatQ(2));
    }
}

TEST_CASE("rasmussen s over the Bar-Natan specialization") {
    REQUIRE(rasmussen_s<F2>(LinkDiagram::unknots(1), PipelineMode::Cube) == 0);
    REQUIRE(rasmussen_s<F2>(LinkDiagram::parse_pd(kUnknotPos), PipelineMode::Cube) == 0);
    REQUIRE(rasmussen_s<F2>(LinkDiagram::parse_pd(kTrefoil), PipelineMode::Cube) == 2);
    REQUIRE(rasmussen_s<Rational>(LinkDiagram::parse_pd(kTrefoil), PipelineMode::Cube) == 2);
    REQUIRE_THROWS_AS(rasmussen_s<F2>(LinkDiagram::unknots(2), PipelineMode::Cube),
                      std::invalid_argument);
}

TEST_CASE("torus knot T(3,-4), full-cube pipeline over F2") {
    auto D = LinkDiagram::parse_pd("PD[X[1,4,5,2],X[5,6,7,3],X[4,8,9,6],X[9,10,11,7],"
                                   "X[8,12,13,10],X[13,14,15,11],X[12,1,17,14],X[17,2,3,15]]");
    REQUIRE(D.n() == 8);
    REQUIRE(D.components() == 1);
    REQUIRE(D.writhe() == -8);
    auto e = make_engine<F2>(D, PipelineMode::Cube, false);
    REQUIRE(e.value_at(RatQ(1)) == RatQ(-6));
    REQUIRE(rasmussen_s<F2>(D, PipelineMode::Cube) == -6);
}
