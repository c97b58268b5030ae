#pragma once

#include <bit>
#include <optional>
#include <stdexcept>
#include <vector>

#include "equikh/complex.hpp"

namespace equikh {

/// Canonical generator data for one orientation: the oriented-resolution
/// vertex and the checkerboard tags of its circles (A -> e1, B -> e2).
struct LeeGenerator {
    std::uint32_t vertex = 0;
    std::vector<CircleTag> tags;
    std::uint32_t orientation_mask = 0;
};

inline LeeGenerator canonical_generator(const LinkDiagram& D, std::uint32_t mask,
                                        std::optional<long> basepoint = {}) {
    LeeGenerator g;
    g.orientation_mask = mask;
    auto word = D.oriented_word(mask);
    for (std::size_t i = 0; i < word.size(); ++i)
        if (word[i]) g.vertex |= 1u << i;
    g.tags = D.checkerboard_labels(mask, basepoint);
    return g;
}

/// The lift of (V-U)^r s_o into CKh(D): A-tagged circles contribute X-U,
/// B-tagged circles contribute V-X, expanded on the {1, X} basis at the
/// oriented-resolution vertex. For reduced complexes the marked circle's
/// X-U factor is the implicit marked factor (its tag must come out A).
template <CoefficientField F>
SparseChain<F> lift_tilde(const CubeComplex<F>& cube, std::uint32_t mask) {
    const LinkDiagram& D = cube.diagram;
    LeeGenerator g = canonical_generator(D, mask, cube.basepoint);
    std::uint32_t u = g.vertex;
    int slots = cube.label_slots(u);
    int marked = cube.basepoint ? cube.marked_circle[u] : -1;
    if (cube.basepoint && g.tags[static_cast<std::size_t>(marked)] != CircleTag::A)
        throw std::logic_error("lift: based normalization failed to tag the marked circle A");

    SparseChain<F> z;
    for (std::uint32_t labels = 0; labels < (1u << slots); ++labels) {
        Poly<F> coeff = Poly<F>::one();
        for (int c = 0; c < cube.circle_count(u); ++c) {
            if (c == marked) continue;
            bool isX = (labels >> cube.unmarked_slot(u, c)) & 1;
            bool tagA = g.tags[static_cast<std::size_t>(c)] == CircleTag::A;
            // X-U = -U*1 + X;  V-X = V*1 - X
            Poly<F> f;
            if (tagA)
                f = isX ? Poly<F>::one() : -Poly<F>::U();
            else
                f = isX ? -Poly<F>::one() : Poly<F>::V();
            coeff = coeff * f;
            if (coeff.is_zero()) break;
        }
        if (!coeff.is_zero()) z[cube.gen_index(u, labels)] = coeff;
    }
    return z;
}

/// Reversing every component yields the companion generator s_obar at the
/// same vertex with all tags swapped.
inline std::uint32_t reversed_mask(const LinkDiagram& D, std::uint32_t mask) {
    return mask ^ ((1u << D.components()) - 1u);
}

/// Column vector of a chain over the generators of its degree.
template <CoefficientField F>
std::vector<Poly<F>> chain_column(const GradedChainComplex<F>& C, int k, const SparseChain<F>& z) {
    std::vector<Poly<F>> col(static_cast<std::size_t>(C.rank_at(k)));
    for (auto& [i, p] : z) col[static_cast<std::size_t>(i)] = p;
    return col;
}

/// A cycle class is nontorsion exactly when it does not become a boundary
/// over Frac(R): homology carries only (V-U)-torsion, and localization
/// kills a cycle iff it lies in the fraction-field column span of the
/// incoming differential.
template <CoefficientField F>
bool is_nontorsion(const GradedChainComplex<F>& C, int k, const SparseChain<F>& z) {
    if (!C.is_cycle(k, z)) throw std::invalid_argument("is_nontorsion: chain is not a cycle");
    if (z.empty()) return false;
    if (k == 0) return true; // no boundaries below the bottom degree
    return !C.diff_matrix(k - 1).in_column_span(chain_column(C, k, z));
}

/// Per-degree rank of the localized homology (dim ker - rank im over
/// Frac(R)); the total over all degrees is 2^components.
template <CoefficientField F>
std::vector<int> localized_rank(const GradedChainComplex<F>& C) {
    int K = C.degree_count();
    std::vector<int> rank_d(static_cast<std::size_t>(K), 0);
    for (int k = 0; k + 1 < K; ++k)
        rank_d[static_cast<std::size_t>(k)] = static_cast<int>(C.diff_matrix(k).ffge_rank());
    std::vector<int> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        int incoming = k > 0 ? rank_d[static_cast<std::size_t>(k - 1)] : 0;
        out[static_cast<std::size_t>(k)] =
            C.rank_at(k) - rank_d[static_cast<std::size_t>(k)] - incoming;
    }
    return out;
}

/// Homological degrees (as offsets) carrying nontorsion classes.
template <CoefficientField F>
std::vector<int> support_degrees(const GradedChainComplex<F>& C) {
    auto ranks = localized_rank(C);
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(ranks.size()); ++k)
        if (ranks[static_cast<std::size_t>(k)] != 0) out.push_back(k);
    return out;
}

/// The involution I: sigma(u) * iota on each tensor factor, where sigma(u)
/// is (-1)^(number of splits along any path from the all-zero vertex).
template <CoefficientField F>
SparseChain<F> apply_involution(const CubeComplex<F>& cube, std::uint32_t u,
                                const SparseChain<F>& z) {
    if (cube.basepoint) throw std::invalid_argument("involution: unreduced complexes only");
    // count splits along the path flipping set bits of u in increasing order
    int splits = 0;
    std::uint32_t w = 0;
    for (int i = 0; i < cube.diagram.n(); ++i) {
        if (!((u >> i) & 1)) continue;
        std::uint32_t w2 = w | (1u << i);
        if (cube.circle_count(w2) > cube.circle_count(w)) ++splits;
        w = w2;
    }
    F sgn = (F::characteristic() != 2 && splits % 2 == 1) ? -F::one() : F::one();

    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    SparseChain<F> out;
    int slots = cube.label_slots(u);
    for (auto& [idx, coeff] : z) {
        std::uint32_t labels = static_cast<std::uint32_t>(idx - cube.vertex_base[u]);
        // iota(1) = 1; iota(X) = (U+V) 1 - X. Expand factor-wise.
        std::map<std::uint32_t, Poly<F>> acc{{0u, coeff * sgn}};
        for (int s = 0; s < slots; ++s) {
            std::map<std::uint32_t, Poly<F>> next;
            bool isX = (labels >> s) & 1;
            for (auto& [lab, c] : acc) {
                if (!isX) {
                    auto& a = next[lab];
                    a = a + c;
                } else {
                    auto& a = next[lab];
                    a = a + c * upv;
                    auto& b = next[lab | (1u << s)];
                    b = b - c;
                }
            }
            acc = std::move(next);
        }
        for (auto& [lab, c] : acc) {
            if (c.is_zero()) continue;
            auto& slot = out[cube.gen_index(u, lab)];
            slot = slot + c;
            if (slot.is_zero()) out.erase(cube.gen_index(u, lab));
        }
    }
    return out;
}

/// The distinguished nontorsion cycle of a positive diagram: the combination
/// of the two lifted generators whose leading pure-X tensors cancel, divided
/// by its single (V-U) factor.
template <CoefficientField F>
SparseChain<F> gamma_class(const CubeComplex<F>& cube, std::uint32_t mask = 0) {
    const LinkDiagram& D = cube.diagram;
    for (int c = 0; c < D.n(); ++c)
        if (D.sign(c) < 0)
            throw std::invalid_argument("gamma_class: positive diagrams only");
    LeeGenerator g = canonical_generator(D, mask, cube.basepoint);
    int a = 0, b = 0;
    for (auto t : g.tags) (t == CircleTag::A ? a : b)++;

    SparseChain<F> so = lift_tilde(cube, mask);
    SparseChain<F> sobar = lift_tilde(cube, reversed_mask(D, mask));
    SparseChain<F> gamma;
    bool subtract = ((a - b) % 2 + 2) % 2 == 0;
    for (auto& [i, p] : so) gamma[i] = p;
    for (auto& [i, p] : sobar) {
        auto& slot = gamma[i];
        slot = subtract ? slot - p : slot + p;
        if (slot.is_zero()) gamma.erase(i);
    }

    std::uint32_t div = UINT32_MAX;
    for (auto& [i, p] : gamma) div = std::min(div, p.vu_divisibility());
    if (div != 1)
        throw std::logic_error("gamma_class: (V-U) should divide exactly once, got " +
                               std::to_string(div));
    SparseChain<F> out;
    for (auto& [i, p] : gamma) out[i] = *p.divide_exact(Poly<F>::VmU());
    return out;
}

} // namespace equikh
