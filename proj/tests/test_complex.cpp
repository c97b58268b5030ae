#include <catch2/catch_amalgamated.hpp>

#include "equikh/complex.hpp"

using namespace equikh;

static const char* kTrefoil = "PD[X[2,1,3,4],X[4,3,5,6],X[6,5,1,2]]";
static const char* kHopf = "PD[X[2,1,3,4],X[4,3,1,2]]";
static const char* kUnknotNeg = "PD[X[1,1,2,2]]";
static const char* kUnknotPos = "PD[X[2,1,1,2]]";

TEST_CASE("frobenius structure maps") {
    using A = AlgebraElem<Rational>;
    using PQ = Poly<Rational>;
    SECTION("X*X = (U+V)X - UV") {
        A xx = mult(A::X(), A::X());
        REQUIRE(xx.c1 == -(PQ::U() * PQ::V()));
        REQUIRE(xx.cX == PQ::U() + PQ::V());
    }
    SECTION("unit") { REQUIRE(mult(A::one(), A::X()) == A::X()); }
    SECTION("(X-U)^2 = (V-U)(X-U)") {
        REQUIRE(mult(A::X_minus_U(), A::X_minus_U()) == A::X_minus_U().scale(PQ::VmU()));
    }
    SECTION("comultiplication on the basis") {
        Tensor2<Rational> d1 = comult(A::one());
        REQUIRE(d1.c[0] == -(PQ::U() + PQ::V()));
        REQUIRE(d1.c[1] == PQ::one());
        REQUIRE(d1.c[2] == PQ::one());
        REQUIRE(d1.c[3].is_zero());
        Tensor2<Rational> dX = comult(A::X());
        REQUIRE(dX.c[0] == -(PQ::U() * PQ::V()));
        REQUIRE(dX.c[3] == PQ::one());
        REQUIRE(comult(A::X_minus_U()) == Tensor2<Rational>::of(A::X_minus_U(), A::X_minus_U()));
    }
    SECTION("counit") {
        REQUIRE(counit(A::X()) == PQ::one());
        REQUIRE(counit(A::one()).is_zero());
        A a = A::X() - A::one().scale(PQ::U() + PQ::V());
        REQUIRE(counit(a) == PQ::one());
    }
    SECTION("involution") {
        A iX = involution(A::X());
        REQUIRE(iX == A::one().scale(PQ::U() + PQ::V()) - A::X());
        REQUIRE(involution(iX) == A::X());
        REQUIRE(involution(A::X_minus_U()) == A::V_minus_X());
    }
    SECTION("frobenius and counit axioms on basis pairs") {
        // (eps (x) id) Delta = id = (id (x) eps) Delta
        for (bool isX : {false, true}) {
            A a = isX ? A::X() : A::one();
            Tensor2<Rational> d = comult(a);
            A left{d.c[2], d.c[3]};  // eps on the first factor keeps X-rows
            A right{d.c[1], d.c[3]}; // eps on the second factor
            REQUIRE(left == a);
            REQUIRE(right == a);
        }
        // (m (x) id)(id (x) Delta) = Delta m on basis pairs
        for (bool aX : {false, true})
            for (bool bX : {false, true}) {
                A a = aX ? A::X() : A::one(), b = bX ? A::X() : A::one();
                Tensor2<Rational> lhs;
                {
                    Tensor2<Rational> db = comult(b);
                    for (int l = 0; l < 2; ++l)
                        for (int r = 0; r < 2; ++r) {
                            A mid = l ? A::X() : A::one();
                            A prod = mult(a, mid);
                            Poly<Rational> coeff = db.c[static_cast<std::size_t>(2 * l + r)];
                            lhs.c[static_cast<std::size_t>(0 * 2 + r)] =
                                lhs.c[static_cast<std::size_t>(r)] + prod.c1 * coeff;
                            lhs.c[static_cast<std::size_t>(2 + r)] =
                                lhs.c[static_cast<std::size_t>(2 + r)] + prod.cX * coeff;
                        }
                }
                Tensor2<Rational> rhs = comult(mult(a, b));
                REQUIRE(lhs == rhs);
            }
    }
    SECTION("involution twists the Frobenius structure by -1") {
        for (bool aX : {false, true})
            for (bool bX : {false, true}) {
                A a = aX ? A::X() : A::one(), b = bX ? A::X() : A::one();
                REQUIRE(involution(mult(a, b)) == mult(involution(a), involution(b)));
            }
        for (bool isX : {false, true}) {
            A a = isX ? A::X() : A::one();
            REQUIRE(counit(involution(a)) == -counit(a));
            Tensor2<Rational> lhs = comult(involution(a));
            Tensor2<Rational> d = comult(a);
            // -(iota (x) iota) Delta(a)
            Tensor2<Rational> rhs;
            for (int l = 0; l < 2; ++l)
                for (int r = 0; r < 2; ++r) {
                    A il = involution(l ? A::X() : A::one());
                    A ir = involution(r ? A::X() : A::one());
                    Tensor2<Rational> piece = Tensor2<Rational>::of(il, ir);
                    for (int i = 0; i < 4; ++i)
                        rhs.c[static_cast<std::size_t>(i)] =
                            rhs.c[static_cast<std::size_t>(i)] +
                            d.c[static_cast<std::size_t>(2 * l + r)] *
                                piece.c[static_cast<std::size_t>(i)];
                }
            REQUIRE(lhs == -rhs);
        }
    }
    SECTION("deloop pairing and round trips") {
        REQUIRE(deloop_pairing_checks<Rational>());
        auto [p, m] = deloop_split(A::X());
        REQUIRE(deloop_merge(p, m) == A::X());
        REQUIRE(deloop_split(deloop_merge(PQ::one(), PQ::zero())).first == PQ::one());
    }
    SECTION("localized idempotents") {
        using L = LocalizedElem<Rational>;
        REQUIRE(L::e1().add(L::e2()).equals(to_localized(A::one())));
        REQUIRE(L::e1().mul(L::e1()).equals(L::e1()));
        REQUIRE(L::e2().mul(L::e2()).equals(L::e2()));
        REQUIRE(L::e1().mul(L::e2()).is_zero());
        REQUIRE(to_localized(A::X_minus_U()).equals(L{PQ::VmU(), PQ::zero(), 0}));
        // clear_denominators inverts to_localized up to one (V-U) factor
        REQUIRE(clear_denominators(L::e1()) == A::X_minus_U());
        REQUIRE(clear_denominators(L::e2()) == A::V_minus_X());
        REQUIRE(L::e1().swap_idempotents().equals(L::e2()));
    }
    SECTION("self-duality identities") {
        REQUIRE_NOTHROW(check_self_duality<Rational>());
        REQUIRE_NOTHROW(check_self_duality<F2>());
        REQUIRE(check_phi_route<Rational>());
    }
}

TEMPLATE_TEST_CASE("cube complexes are complexes", "", Rational, F2) {
    using F = TestType;
    for (const char* pd : {kUnknotNeg, kUnknotPos, kTrefoil, kHopf}) {
        auto D = LinkDiagram::parse_pd(pd);
        auto cube = build_cube<F>(D);
        REQUIRE(cube.C.d_squared_is_zero());
        REQUIRE(cube.C.grq_homogeneous());
    }
}

TEST_CASE("one-crossing negative unknot matches the comultiplication") {
    auto D = LinkDiagram::parse_pd(kUnknotNeg);
    auto cube = build_cube<Rational>(D);
    // Supported in homological degrees -1 and 0.
    REQUIRE(cube.C.h_min == -1);
    REQUIRE(cube.C.h_max() == 0);
    REQUIRE(cube.C.rank_at(0) == 2); // one circle at u=0
    REQUIRE(cube.C.rank_at(1) == 4); // two circles at u=1

    using PQ = Poly<Rational>;
    // d(1) = X(x)1 + 1(x)X - (U+V) 1(x)1
    SparseChain<Rational> one{{cube.gen_index(0, 0), PQ::one()}};
    auto d1 = cube.C.apply_diff(0, one);
    REQUIRE(d1.size() == 3);
    REQUIRE(d1.at(cube.gen_index(1, 0b01)) == PQ::one());
    REQUIRE(d1.at(cube.gen_index(1, 0b10)) == PQ::one());
    REQUIRE(d1.at(cube.gen_index(1, 0b00)) == -(PQ::U() + PQ::V()));
    // d(X) = X(x)X - UV 1(x)1
    SparseChain<Rational> x{{cube.gen_index(0, 1), PQ::one()}};
    auto dx = cube.C.apply_diff(0, x);
    REQUIRE(dx.size() == 2);
    REQUIRE(dx.at(cube.gen_index(1, 0b11)) == PQ::one());
    REQUIRE(dx.at(cube.gen_index(1, 0b00)) == -(PQ::U() * PQ::V()));
}

TEST_CASE("crossingless unknot complex") {
    auto D = LinkDiagram::unknots(1);
    auto cube = build_cube<Rational>(D);
    REQUIRE(cube.C.degree_count() == 1);
    REQUIRE(cube.C.h_min == 0);
    REQUIRE(cube.C.grq[0] == std::vector<int>{1, -1});
}

TEST_CASE("reduced subcomplex") {
    SECTION("crossingless based unknot: one generator at grq 0") {
        auto D = LinkDiagram::unknots(1);
        auto cube = build_cube<Rational>(D, D.bare_label(0));
        REQUIRE(cube.C.total_rank() == 1);
        REQUIRE(cube.C.grq[0] == std::vector<int>{0});
    }
    SECTION("one-crossing based unknot: closed two-step complex") {
        auto D = LinkDiagram::parse_pd(kUnknotNeg);
        auto cube = build_cube<Rational>(D, 1);
        REQUIRE(cube.C.rank_at(0) == 1);
        REQUIRE(cube.C.rank_at(1) == 2);
        REQUIRE(cube.C.d_squared_is_zero());
        REQUIRE(cube.C.grq_homogeneous());
    }
    SECTION("reduced generators embed as a subcomplex of the full cube") {
        // The inclusion sends a reduced generator to the full-cube chain with
        // the marked circle expanded as X - U; it must intertwine the
        // differentials.
        auto D = LinkDiagram::parse_pd(kTrefoil);
        long bp = 1;
        auto red = build_cube<Rational>(D, bp);
        auto fullc = build_cube<Rational>(D);
        using PQ = Poly<Rational>;
        const std::uint32_t nv = 1u << D.n();
        auto include = [&](std::uint32_t u, std::uint32_t labels) {
            SparseChain<Rational> z;
            int m = red.marked_circle[u];
            std::uint32_t base = 0;
            for (int c = 0; c < red.circle_count(u); ++c) {
                if (c == m) continue;
                if ((labels >> red.unmarked_slot(u, c)) & 1) base |= 1u << c;
            }
            z[fullc.gen_index(u, base | (1u << m))] = PQ::one();
            z[fullc.gen_index(u, base)] = -PQ::U();
            return z;
        };
        for (std::uint32_t u = 0; u < nv; ++u) {
            int k = red.degree_offset(u);
            for (std::uint32_t g = 0; g < (1u << red.label_slots(u)); ++g) {
                // d(include(g)) == include(d_red(g))
                auto lhs = fullc.C.apply_diff(k, include(u, g));
                SparseChain<Rational> rhs;
                SparseChain<Rational> dgen =
                    red.C.apply_diff(k, {{red.gen_index(u, g), PQ::one()}});
                for (auto& [tgt, p] : dgen) {
                    // locate (vertex, labels) of tgt in the reduced cube
                    for (std::uint32_t v = 0; v < nv; ++v) {
                        if (red.degree_offset(v) != k + 1) continue;
                        int base = red.vertex_base[v];
                        int cnt = 1 << red.label_slots(v);
                        if (tgt >= base && tgt < base + cnt) {
                            for (auto& [fi, c] :
                                 include(v, static_cast<std::uint32_t>(tgt - base))) {
                                auto& acc = rhs[fi];
                                acc = acc + c * p;
                                if (acc.is_zero()) rhs.erase(fi);
                            }
                            break;
                        }
                    }
                }
                REQUIRE(lhs == rhs);
            }
        }
    }
}

TEST_CASE("mirror dual complex") {
    auto D = LinkDiagram::parse_pd(kTrefoil);
    auto cube = build_cube<Rational>(D);
    auto dual = cube.C.mirror_dual();
    SECTION("degree and grading reversal") {
        REQUIRE(dual.h_min == -cube.C.h_max());
        REQUIRE(dual.h_max() == -cube.C.h_min);
        REQUIRE(dual.total_rank() == cube.C.total_rank());
        REQUIRE(dual.d_squared_is_zero());
    }
    SECTION("involution up to structural equality") {
        auto dd = dual.mirror_dual();
        REQUIRE(dd.h_min == cube.C.h_min);
        REQUIRE(dd.grq == cube.C.grq);
        for (int k = 0; k + 1 < dd.degree_count(); ++k) {
            auto a = dd.diff_matrix(k);
            auto b = cube.C.diff_matrix(k);
            REQUIRE(a.entries() == b.entries());
        }
    }
    SECTION("self-mirror of the crossingless unknot") {
        auto U = LinkDiagram::unknots(1);
        auto cu = build_cube<Rational>(U);
        auto du = cu.C.mirror_dual();
        REQUIRE(du.grq[0] == std::vector<int>{-1, 1});
        REQUIRE(du.h_min == 0);
    }
}

TEMPLATE_TEST_CASE("mirror duality intertwiner", "", Rational, F2) {
    using F = TestType;
    SECTION("unreduced") {
        for (const char* pd : {kUnknotPos, kUnknotNeg, kTrefoil}) {
            auto r = verify_mirror_duality<F>(LinkDiagram::parse_pd(pd));
            INFO(r.detail);
            REQUIRE(r.ok);
        }
    }
    SECTION("reduced") {
        for (const char* pd : {kUnknotPos, kUnknotNeg, kTrefoil}) {
            auto r = verify_mirror_duality<F>(LinkDiagram::parse_pd(pd), 1L);
            INFO(r.detail);
            REQUIRE(r.ok);
        }
    }
}

TEST_CASE("complex JSON serialization") {
    auto D = LinkDiagram::parse_pd(kUnknotNeg);
    auto cube = build_cube<Rational>(D);
    auto j = cube.C.to_json();
    REQUIRE(j["h_min"] == -1);
    REQUIRE(j["generators"].size() == 2);
    REQUIRE(j["generators"][0].size() == 2);
    REQUIRE(j["differential"][0].size() == 2);
}
