#pragma once

#include <array>
#include <stdexcept>

#include "equikh/poly.hpp"

namespace equikh {

// The Frobenius pair (R, A) with A = R[X]/((X-U)(X-V)), gradings
// gr(1) = 1, gr(X) = -1, trace eps(1) = 0, eps(X) = 1. Elements are stored
// on the free basis {1, X}; the {X-U, X-V} and {e1, e2} viewpoints are
// reached through explicit conversions.

template <CoefficientField F>
struct AlgebraElem {
    Poly<F> c1; // coefficient of 1
    Poly<F> cX; // coefficient of X

    static AlgebraElem zero() { return {}; }
    static AlgebraElem one() { return {Poly<F>::one(), Poly<F>::zero()}; }
    static AlgebraElem X() { return {Poly<F>::zero(), Poly<F>::one()}; }
    static AlgebraElem X_minus_U() { return {-Poly<F>::U(), Poly<F>::one()}; }
    static AlgebraElem V_minus_X() { return {Poly<F>::V(), -Poly<F>::one()}; }

    bool is_zero() const { return c1.is_zero() && cX.is_zero(); }
    bool operator==(const AlgebraElem& o) const { return c1 == o.c1 && cX == o.cX; }

    AlgebraElem operator+(const AlgebraElem& o) const { return {c1 + o.c1, cX + o.cX}; }
    AlgebraElem operator-(const AlgebraElem& o) const { return {c1 - o.c1, cX - o.cX}; }
    AlgebraElem operator-() const { return {-c1, -cX}; }
    AlgebraElem scale(const Poly<F>& p) const { return {c1 * p, cX * p}; }

    /// Is the element homogeneous of the given grading?
    bool is_homogeneous(int gr) const {
        for (auto& [m, c] : c1.terms())
            if (1 - 2 * static_cast<int>(m.total()) != gr) return false;
        for (auto& [m, c] : cX.terms())
            if (-1 - 2 * static_cast<int>(m.total()) != gr) return false;
        return true;
    }
};

/// Element of A (x) A on the basis {1(x)1, 1(x)X, X(x)1, X(x)X};
/// index = 2*(left is X) + (right is X).
template <CoefficientField F>
struct Tensor2 {
    std::array<Poly<F>, 4> c{};

    bool operator==(const Tensor2& o) const { return c == o.c; }
    Tensor2 operator+(const Tensor2& o) const {
        Tensor2 r;
        for (int i = 0; i < 4; ++i) r.c[static_cast<std::size_t>(i)] =
            c[static_cast<std::size_t>(i)] + o.c[static_cast<std::size_t>(i)];
        return r;
    }
    Tensor2 operator-() const {
        Tensor2 r;
        for (int i = 0; i < 4; ++i) r.c[static_cast<std::size_t>(i)] = -c[static_cast<std::size_t>(i)];
        return r;
    }
    static Tensor2 of(const AlgebraElem<F>& a, const AlgebraElem<F>& b) {
        Tensor2 r;
        r.c[0] = a.c1 * b.c1;
        r.c[1] = a.c1 * b.cX;
        r.c[2] = a.cX * b.c1;
        r.c[3] = a.cX * b.cX;
        return r;
    }
};

/// Multiplication, reduced by X^2 = (U+V)X - UV.
template <CoefficientField F>
AlgebraElem<F> mult(const AlgebraElem<F>& a, const AlgebraElem<F>& b) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    Poly<F> xx = a.cX * b.cX;
    return {a.c1 * b.c1 - xx * uv, a.c1 * b.cX + a.cX * b.c1 + xx * upv};
}

/// Comultiplication: Delta(1) = X(x)1 + 1(x)X - (U+V) 1(x)1,
/// Delta(X) = X(x)X - UV 1(x)1, extended R-linearly.
template <CoefficientField F>
Tensor2<F> comult(const AlgebraElem<F>& a) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    Tensor2<F> r;
    r.c[0] = -(a.c1 * upv) - a.cX * uv;
    r.c[1] = a.c1;
    r.c[2] = a.c1;
    r.c[3] = a.cX;
    return r;
}

/// Trace eps(1) = 0, eps(X) = 1.
template <CoefficientField F>
Poly<F> counit(const AlgebraElem<F>& a) {
    return a.cX;
}

/// Unit R -> A.
template <CoefficientField F>
AlgebraElem<F> unit(const Poly<F>& p) {
    return {p, Poly<F>::zero()};
}

/// iota(X) = U + V - X; an algebra involution exchanging X-U and V-X.
template <CoefficientField F>
AlgebraElem<F> involution(const AlgebraElem<F>& a) {
    return {a.c1 + a.cX * (Poly<F>::U() + Poly<F>::V()), -a.cX};
}

// Delooping. A is free with basis {1, X}; the dual basis under the trace
// pairing <a,b> = eps(ab) is {X - (U+V)1, 1}, which realizes the coordinate
// projections as trace pairings. split: A -> R{+1} (+) R{-1}; merge inverse.
template <CoefficientField F>
std::pair<Poly<F>, Poly<F>> deloop_split(const AlgebraElem<F>& a) {
    return {a.c1, a.cX};
}
template <CoefficientField F>
AlgebraElem<F> deloop_merge(const Poly<F>& plus_part, const Poly<F>& minus_part) {
    return {plus_part, minus_part};
}
/// The two pairing identities behind deloop_split.
template <CoefficientField F>
bool deloop_pairing_checks() {
    AlgebraElem<F> dual1{-(Poly<F>::U() + Poly<F>::V()), Poly<F>::one()}; // X - (U+V)1
    return counit(mult(AlgebraElem<F>::one(), dual1)) == Poly<F>::one() &&
           counit(mult(AlgebraElem<F>::X(), dual1)).is_zero() &&
           counit(mult(AlgebraElem<F>::one(), AlgebraElem<F>::one())).is_zero() &&
           counit(mult(AlgebraElem<F>::X(), AlgebraElem<F>::one())) == Poly<F>::one();
}

// ---------------------------------------------------------------------------
// Localization at (V-U)^2: the idempotent basis e1 = (X-U)/(V-U),
// e2 = -(X-V)/(V-U). Elements are kept with cleared denominators: a pair of
// numerator polynomials over {e1, e2} and a (V-U)-power.

template <CoefficientField F>
struct LocalizedElem {
    Poly<F> p; // e1 numerator
    Poly<F> q; // e2 numerator
    std::uint32_t denom_pow = 0;

    static LocalizedElem e1() { return {Poly<F>::one(), Poly<F>::zero(), 0}; }
    static LocalizedElem e2() { return {Poly<F>::zero(), Poly<F>::one(), 0}; }

    bool is_zero() const { return p.is_zero() && q.is_zero(); }

    /// Equality in A_D (cross-multiplied).
    bool equals(const LocalizedElem& o) const {
        Poly<F> vmu = Poly<F>::VmU();
        Poly<F> l = Poly<F>::one(), r = Poly<F>::one();
        for (std::uint32_t i = 0; i < o.denom_pow; ++i) l = l * vmu;
        for (std::uint32_t i = 0; i < denom_pow; ++i) r = r * vmu;
        return p * l == o.p * r && q * l == o.q * r;
    }

    LocalizedElem mul(const LocalizedElem& o) const {
        return {p * o.p, q * o.q, denom_pow + o.denom_pow};
    }
    LocalizedElem add(const LocalizedElem& o) const {
        Poly<F> vmu = Poly<F>::VmU();
        std::uint32_t k = std::max(denom_pow, o.denom_pow);
        Poly<F> la = Poly<F>::one(), lb = Poly<F>::one();
        for (std::uint32_t i = 0; i < k - denom_pow; ++i) la = la * vmu;
        for (std::uint32_t i = 0; i < k - o.denom_pow; ++i) lb = lb * vmu;
        return {p * la + o.p * lb, q * la + o.q * lb, k};
    }
    LocalizedElem swap_idempotents() const { return {q, p, denom_pow}; } // iota
};

/// Change of basis {1, X} -> {e1, e2}: 1 = e1 + e2, X = V e1 + U e2.
template <CoefficientField F>
LocalizedElem<F> to_localized(const AlgebraElem<F>& a) {
    return {a.c1 + Poly<F>::V() * a.cX, a.c1 + Poly<F>::U() * a.cX, 0};
}

/// Back to the {1, X} basis after clearing denominators: returns
/// (V-U)^denom_pow * (p e1 + q e2) as an element of A.
template <CoefficientField F>
AlgebraElem<F> clear_denominators(const LocalizedElem<F>& l) {
    // (V-U)(p e1 + q e2) = p(X-U) + q(V-X).
    AlgebraElem<F> cleared{Poly<F>::V() * l.q - Poly<F>::U() * l.p, l.p - l.q};
    return cleared;
}

// ---------------------------------------------------------------------------
// Graded dual A* with basis {1*, X*} (gr(1*) = -1, gr(X*) = +1) and the
// self-duality isomorphism gamma(1) = X*, gamma(X) = 1* + (U+V)X*.

template <CoefficientField F>
struct DualElem {
    Poly<F> d1; // coefficient of 1*
    Poly<F> dX; // coefficient of X*

    bool operator==(const DualElem& o) const { return d1 == o.d1 && dX == o.dX; }
    DualElem operator+(const DualElem& o) const { return {d1 + o.d1, dX + o.dX}; }
    bool is_homogeneous(int gr) const {
        for (auto& [m, c] : d1.terms())
            if (-1 - 2 * static_cast<int>(m.total()) != gr) return false;
        for (auto& [m, c] : dX.terms())
            if (1 - 2 * static_cast<int>(m.total()) != gr) return false;
        return true;
    }
};

template <CoefficientField F>
struct DualTensor2 {
    std::array<Poly<F>, 4> c{}; // basis 1*(x)1*, 1*(x)X*, X*(x)1*, X*(x)X*
    bool operator==(const DualTensor2& o) const { return c == o.c; }
};

template <CoefficientField F>
DualElem<F> gamma_iso(const AlgebraElem<F>& a) {
    return {a.cX, a.c1 + (Poly<F>::U() + Poly<F>::V()) * a.cX};
}

/// Structure maps of the dual Frobenius system F* (obtained by dualizing).
/// counit of F*: 1* -> 1, X* -> 0.
template <CoefficientField F>
Poly<F> dual_counit(const DualElem<F>& a) {
    return a.d1;
}
/// unit of F*: 1 -> X*.
template <CoefficientField F>
DualElem<F> dual_unit(const Poly<F>& p) {
    return {Poly<F>::zero(), p};
}
/// comultiplication of F* (the dual of multiplication):
/// 1* -> 1*(x)1* - UV X*(x)X*, X* -> 1*(x)X* + X*(x)1* + (U+V) X*(x)X*.
template <CoefficientField F>
DualTensor2<F> dual_comult(const DualElem<F>& a) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    DualTensor2<F> r;
    r.c[0] = a.d1;
    r.c[1] = a.dX;
    r.c[2] = a.dX;
    r.c[3] = -(a.d1 * uv) + a.dX * upv;
    return r;
}
/// multiplication of F* (the dual of comultiplication):
/// 1*(x)1* -> -(U+V)1* - UV X*, X*(x)1* and 1*(x)X* -> 1*, X*(x)X* -> X*.
template <CoefficientField F>
DualElem<F> dual_mult(const DualTensor2<F>& t) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    return {-(t.c[0] * upv) + t.c[1] + t.c[2], -(t.c[0] * uv) + t.c[3]};
}

template <CoefficientField F>
DualTensor2<F> gamma_tensor(const Tensor2<F>& t) {
    // (gamma (x) gamma) on the tensor basis.
    DualTensor2<F> r;
    auto g = [&](bool isX) { return gamma_iso(isX ? AlgebraElem<F>::X() : AlgebraElem<F>::one()); };
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) {
            DualElem<F> gl = g(l == 1), gm = g(m == 1);
            const Poly<F>& coeff = t.c[static_cast<std::size_t>(2 * l + m)];
            r.c[0] = r.c[0] + coeff * (gl.d1 * gm.d1);
            r.c[1] = r.c[1] + coeff * (gl.d1 * gm.dX);
            r.c[2] = r.c[2] + coeff * (gl.dX * gm.d1);
            r.c[3] = r.c[3] + coeff * (gl.dX * gm.dX);
        }
    return r;
}

/// Machine check of the four intertwining identities making gamma an
/// isomorphism of Frobenius systems A ~ A*. Throws on failure (an identity
/// breaking here means the structure maps are mis-implemented).
template <CoefficientField F>
void check_self_duality() {
    // unit <-> dual unit
    if (!(gamma_iso(AlgebraElem<F>::one()) == dual_unit(Poly<F>::one())))
        throw std::logic_error("self-duality: unit identity fails");
    // counit <-> dual counit on the basis
    for (bool isX : {false, true}) {
        AlgebraElem<F> a = isX ? AlgebraElem<F>::X() : AlgebraElem<F>::one();
        if (!(dual_counit(gamma_iso(a)) == counit(a)))
            throw std::logic_error("self-duality: counit identity fails");
    }
    // multiplication <-> dual multiplication on basis pairs
    for (bool aX : {false, true})
        for (bool bX : {false, true}) {
            AlgebraElem<F> a = aX ? AlgebraElem<F>::X() : AlgebraElem<F>::one();
            AlgebraElem<F> b = bX ? AlgebraElem<F>::X() : AlgebraElem<F>::one();
            DualTensor2<F> gab = gamma_tensor(Tensor2<F>::of(a, b));
            if (!(dual_mult(gab) == gamma_iso(mult(a, b))))
                throw std::logic_error("self-duality: multiplication identity fails");
        }
    // comultiplication <-> dual comultiplication on the basis
    for (bool isX : {false, true}) {
        AlgebraElem<F> a = isX ? AlgebraElem<F>::X() : AlgebraElem<F>::one();
        if (!(gamma_tensor(comult(a)) == dual_comult(gamma_iso(a))))
            throw std::logic_error("self-duality: comultiplication identity fails");
    }
    // gamma preserves gradings
    if (!gamma_iso(AlgebraElem<F>::one()).is_homogeneous(1) ||
        !gamma_iso(AlgebraElem<F>::X()).is_homogeneous(-1))
        throw std::logic_error("self-duality: gamma is not grading preserving");
}

/// The auxiliary route through A' = R[X]/((X+U)(X+V)): phi(X) = X + U + V
/// intertwines the two comultiplications. Returns true when both displayed
/// identities hold.
template <CoefficientField F>
bool check_phi_route() {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    auto phi = [&](const AlgebraElem<F>& a) -> AlgebraElem<F> {
        return {a.c1 + a.cX * upv, a.cX}; // X -> X + (U+V)1
    };
    // Comultiplication of A': Delta'(1) = (X+U)(x)1 + 1(x)(X+V),
    // Delta'(X) = X(x)X - UV 1(x)1, extended linearly.
    auto comult_prime = [&](const AlgebraElem<F>& a) -> Tensor2<F> {
        Tensor2<F> r;
        r.c[0] = a.c1 * upv - a.cX * uv;
        r.c[1] = a.c1;
        r.c[2] = a.c1;
        r.c[3] = a.cX;
        return r;
    };
    // Delta'(1) uses U on the left and V on the right:
    {
        Tensor2<F> d1;
        d1.c[2] = Poly<F>::one();              // X(x)1
        d1.c[0] = Poly<F>::U();                // U 1(x)1
        d1.c[1] = Poly<F>::one();              // 1(x)X
        d1.c[0] = d1.c[0] + Poly<F>::V();      // + V 1(x)1
        if (!(comult_prime(AlgebraElem<F>::one()) == d1)) return false;
    }
    auto phi_tensor = [&](const Tensor2<F>& t) -> Tensor2<F> {
        Tensor2<F> r;
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m) {
                AlgebraElem<F> pl = phi(l ? AlgebraElem<F>::X() : AlgebraElem<F>::one());
                AlgebraElem<F> pm = phi(m ? AlgebraElem<F>::X() : AlgebraElem<F>::one());
                Tensor2<F> piece = Tensor2<F>::of(pl, pm);
                for (int i = 0; i < 4; ++i)
                    r.c[static_cast<std::size_t>(i)] =
                        r.c[static_cast<std::size_t>(i)] +
                        t.c[static_cast<std::size_t>(2 * l + m)] * piece.c[static_cast<std::size_t>(i)];
            }
        return r;
    };
    for (bool isX : {false, true}) {
        AlgebraElem<F> a = isX ? AlgebraElem<F>::X() : AlgebraElem<F>::one();
        if (!(comult_prime(phi(a)) == phi_tensor(comult(a)))) return false;
        if (!(counit(phi(a)) == counit(a))) return false;
    }
    return true;
}

} // namespace equikh
