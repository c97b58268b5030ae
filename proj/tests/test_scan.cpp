#include <catch2/catch_amalgamated.hpp>

#include "equikh/scan.hpp"
#include "equikh/lee.hpp"

using namespace equikh;

static const char* kTrefoil = "PD[X[2,1,3,4],X[4,3,5,6],X[6,5,1,2]]";
static const char* kHopf = "PD[X[2,1,3,4],X[4,3,1,2]]";
static const char* kUnknotPos = "PD[X[2,1,1,2]]";
static const char* kUnknotNeg = "PD[X[1,1,2,2]]";
static const char* kTrefoilKink = "PD[X[2,1,4,5],X[5,4,6,7],X[7,6,1,9],X[3,9,2,3]]";
static const char* kGranny =
    "PD[X[2,1,4,5],X[5,4,6,7],X[7,6,1,9],X[3,9,10,11],X[11,10,12,13],X[13,12,2,3]]";

namespace {
template <class F>
Poly<F> graded_euler(const GradedChainComplex<F>& C) {
    // sum over generators of (-1)^h q^{grq} packed as a polynomial in U (q>=0
    // shifted); enough to compare complexes up to chain homotopy equivalence.
    Poly<F> acc;
    int shift = 64;
    for (int k = 0; k < C.degree_count(); ++k) {
        int h = C.h_min + k;
        for (int q : C.grq[static_cast<std::size_t>(k)]) {
            F sgn = (F::characteristic() != 2 && ((h % 2) + 2) % 2 == 1) ? -F::one() : F::one();
            acc.add_term(Monomial{static_cast<std::uint32_t>(q + shift), 0}, sgn);
        }
    }
    return acc;
}
} // namespace

TEMPLATE_TEST_CASE("scan output is a valid complex", "", F2, Rational) {
    using F = TestType;
    for (const char* pd : {kUnknotPos, kUnknotNeg, kHopf, kTrefoil, kTrefoilKink, kGranny}) {
        auto D = LinkDiagram::parse_pd(pd);
        auto C = scan_reduce_complex<F>(D, std::nullopt);
        INFO(pd);
        REQUIRE(C.d_squared_is_zero());
        REQUIRE(C.grq_homogeneous());
    }
}

TEST_CASE("scan reduces the unknot to two free generators") {
    for (const char* pd : {kUnknotPos, kUnknotNeg}) {
        auto D = LinkDiagram::parse_pd(pd);
        auto C = scan_reduce_complex<F2>(D, std::nullopt);
        REQUIRE(C.total_rank() == 2);
        std::vector<int> qs;
        for (int k = 0; k < C.degree_count(); ++k)
            for (int q : C.grq[static_cast<std::size_t>(k)]) qs.push_back(q);
        std::sort(qs.begin(), qs.end());
        REQUIRE(qs == std::vector<int>{-1, 1});
        for (int k = 0; k + 1 < C.degree_count(); ++k)
            for (auto& col : C.diff[static_cast<std::size_t>(k)]) REQUIRE(col.empty());
    }
}

TEMPLATE_TEST_CASE("scan localized ranks match 2^components", "", F2, Rational) {
    using F = TestType;
    struct Case { const char* pd; int comps; };
    for (auto cs : {Case{kTrefoil, 1}, Case{kHopf, 2}, Case{kTrefoilKink, 1}}) {
        auto D = LinkDiagram::parse_pd(cs.pd);
        auto C = scan_reduce_complex<F>(D, std::nullopt);
        int total = 0;
        for (int r : localized_rank(C)) total += r;
        INFO(cs.pd);
        REQUIRE(total == (1 << cs.comps));
    }
}

TEMPLATE_TEST_CASE("scan and cube have the same graded Euler characteristic", "", F2, Rational) {
    using F = TestType;
    for (const char* pd : {kUnknotPos, kUnknotNeg, kHopf, kTrefoil}) {
        auto D = LinkDiagram::parse_pd(pd);
        auto Cs = scan_reduce_complex<F>(D, std::nullopt);
        auto Cc = build_cube<F>(D).C;
        INFO(pd);
        REQUIRE(graded_euler(Cs) == graded_euler(Cc));
    }
}

TEST_CASE("reduced scan complexes") {
    SECTION("based unknots reduce to one generator at grq 0") {
        for (const char* pd : {kUnknotPos, kUnknotNeg}) {
            auto D = LinkDiagram::parse_pd(pd);
            auto C = scan_reduce_complex<F2>(D, 1L);
            REQUIRE(C.total_rank() == 1);
            REQUIRE(C.grq[static_cast<std::size_t>(C.offset_of(0))] == std::vector<int>{0});
        }
    }
    SECTION("based trefoil: valid complex, graded Euler matches the reduced cube") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        auto Cs = scan_reduce_complex<Rational>(D, 1L);
        REQUIRE(Cs.d_squared_is_zero());
        REQUIRE(Cs.grq_homogeneous());
        auto Cc = build_cube<Rational>(D, 1L).C;
        REQUIRE(graded_euler(Cs) == graded_euler(Cc));
    }
    SECTION("bare based circle") {
        auto D = LinkDiagram::unknots(1);
        auto C = scan_reduce_complex<F2>(D, D.bare_label(0));
        REQUIRE(C.total_rank() == 1);
        REQUIRE(C.grq[0] == std::vector<int>{0});
    }
}

TEST_CASE("scan pipeline values agree with the cube pipeline") {
    const char* t3m4 = "PD[X[1,4,5,2],X[5,6,7,3],X[4,8,9,6],X[9,10,11,7],"
                       "X[8,12,13,10],X[13,14,15,11],X[12,1,17,14],X[17,2,3,15]]";
    SECTION("unknots and trefoil at several t") {
        for (const char* pd : {kUnknotPos, kUnknotNeg, kTrefoil, kTrefoilKink}) {
            auto D = LinkDiagram::parse_pd(pd);
            auto es = make_engine<F2>(D, PipelineMode::Scan, false);
            auto ec = make_engine<F2>(D, PipelineMode::Cube, false);
            for (auto t : {RatQ(1, 4), RatQ(1), RatQ(3, 2)}) {
                INFO(pd << " t=" << ratq_str(t));
                REQUIRE(es.value_at(t) == ec.value_at(t));
            }
            REQUIRE(es.value_at_endpoint(0).value == ec.value_at_endpoint(0).value);
        }
    }
    SECTION("hopf link") {
        auto D = LinkDiagram::parse_pd(kHopf);
        auto es = make_engine<F2>(D, PipelineMode::Scan, false);
        auto ec = make_engine<F2>(D, PipelineMode::Cube, false);
        for (auto t : {RatQ(1, 2), RatQ(1)}) REQUIRE(es.value_at(t) == ec.value_at(t));
    }
    SECTION("granny knot: positive 6-crossing diagram gives n - r + 1 = 4") {
        auto D = LinkDiagram::parse_pd(kGranny);
        auto e = make_engine<F2>(D, PipelineMode::Scan, false);
        REQUIRE(e.value_at(RatQ(1)) == RatQ(4));
        REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(4));
    }
    SECTION("T(3,-4) in scan mode over F2") {
        auto D = LinkDiagram::parse_pd(t3m4);
        auto e = make_engine<F2>(D, PipelineMode::Scan, false);
        REQUIRE(e.value_at(RatQ(1)) == RatQ(-6));
        REQUIRE(e.value_at(RatQ(1, 2)) == RatQ(-6));
        REQUIRE(rasmussen_s<F2>(D, PipelineMode::Scan) == -6);
    }
    SECTION("reduced scan pipeline agrees with reduced cube") {
        auto D = LinkDiagram::parse_pd(kTrefoil);
        D.set_basepoint(1);
        auto es = make_engine<F2>(D, PipelineMode::Scan, true);
        auto ec = make_engine<F2>(D, PipelineMode::Cube, true);
        for (auto t : {RatQ(1, 2), RatQ(1)}) REQUIRE(es.value_at(t) == ec.value_at(t));
    }
}
