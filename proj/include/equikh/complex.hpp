#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "equikh/diagram.hpp"
#include "equikh/frobenius.hpp"
#include "equikh/poly_matrix.hpp"

namespace equikh {

/// A chain at a fixed homological degree: generator index -> coefficient.
template <CoefficientField F>
using SparseChain = std::map<int, Poly<F>>;

/// Chain complex of free graded R-modules with finitely many gr_q-homogeneous
/// generators per homological degree and a gr_q-preserving differential.
template <CoefficientField F>
class GradedChainComplex {
  public:
    int h_min = 0;
    /// gr_q of each generator, per degree offset (h = h_min + k).
    std::vector<std::vector<int>> grq;
    /// diff[k][src] = entries into degree k+1 as (tgt, coefficient).
    std::vector<std::vector<std::vector<std::pair<int, Poly<F>>>>> diff;

    int degree_count() const { return static_cast<int>(grq.size()); }
    int h_max() const { return h_min + degree_count() - 1; }
    int rank_at(int k) const { return static_cast<int>(grq[static_cast<std::size_t>(k)].size()); }
    int offset_of(int h) const { return h - h_min; }
    int total_rank() const {
        int t = 0;
        for (auto& g : grq) t += static_cast<int>(g.size());
        return t;
    }

    /// Differential block from degree offset k to k+1 (rows = targets).
    PolyMatrix<F> diff_matrix(int k) const {
        std::size_t rows =
            k + 1 < degree_count() ? grq[static_cast<std::size_t>(k + 1)].size() : 0;
        PolyMatrix<F> m(rows, grq[static_cast<std::size_t>(k)].size());
        if (k + 1 < degree_count())
            for (std::size_t src = 0; src < diff[static_cast<std::size_t>(k)].size(); ++src)
                for (auto& [tgt, p] : diff[static_cast<std::size_t>(k)][src])
                    m.add(static_cast<std::size_t>(tgt), src, p);
        return m;
    }

    SparseChain<F> apply_diff(int k, const SparseChain<F>& z) const {
        SparseChain<F> out;
        if (k + 1 >= degree_count()) return out;
        for (auto& [src, c] : z)
            for (auto& [tgt, p] :
                 diff[static_cast<std::size_t>(k)][static_cast<std::size_t>(src)]) {
                auto& acc = out[tgt];
                acc = acc + p * c;
                if (acc.is_zero()) out.erase(tgt);
            }
        return out;
    }

    bool is_cycle(int k, const SparseChain<F>& z) const { return apply_diff(k, z).empty(); }

    bool d_squared_is_zero() const {
        for (int k = 0; k + 1 < degree_count(); ++k)
            for (int src = 0; src < rank_at(k); ++src) {
                SparseChain<F> z{{src, Poly<F>::one()}};
                if (!apply_diff(k + 1, apply_diff(k, z)).empty()) return false;
            }
        return true;
    }

    /// Every differential entry preserves gr_q.
    bool grq_homogeneous() const {
        for (int k = 0; k + 1 < degree_count(); ++k)
            for (std::size_t src = 0; src < diff[static_cast<std::size_t>(k)].size(); ++src)
                for (auto& [tgt, p] : diff[static_cast<std::size_t>(k)][src]) {
                    int qs = grq[static_cast<std::size_t>(k)][src];
                    int qt = grq[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(tgt)];
                    int need = qt - qs;
                    if (need < 0 || need % 2 != 0) return false;
                    if (!p.is_total_degree_homogeneous(static_cast<std::uint32_t>(need / 2)))
                        return false;
                }
        return true;
    }

    /// Dual complex of the mirror: degree i holds the dual of degree -i,
    /// gradings negate, differential blocks transpose.
    GradedChainComplex mirror_dual() const {
        GradedChainComplex d;
        int K = degree_count();
        d.h_min = -h_max();
        d.grq.resize(static_cast<std::size_t>(K));
        d.diff.assign(static_cast<std::size_t>(K), {});
        for (int k = 0; k < K; ++k) {
            const auto& src = grq[static_cast<std::size_t>(K - 1 - k)];
            auto& dst = d.grq[static_cast<std::size_t>(k)];
            dst.resize(src.size());
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -src[i];
        }
        for (int k = 0; k < K; ++k) {
            d.diff[static_cast<std::size_t>(k)].assign(d.grq[static_cast<std::size_t>(k)].size(),
                                                       {});
            if (k + 1 >= K) continue;
            int ok = K - 2 - k; // old block dualized into new block k -> k+1
            for (std::size_t osrc = 0; osrc < diff[static_cast<std::size_t>(ok)].size(); ++osrc)
                for (auto& [otgt, p] : diff[static_cast<std::size_t>(ok)][osrc])
                    d.diff[static_cast<std::size_t>(k)][static_cast<std::size_t>(otgt)].push_back(
                        {static_cast<int>(osrc), p});
        }
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["h_min"] = h_min;
        j["generators"] = nlohmann::json::array();
        j["differential"] = nlohmann::json::array();
        for (int k = 0; k < degree_count(); ++k) {
            nlohmann::json gens = nlohmann::json::array();
            for (int q : grq[static_cast<std::size_t>(k)]) gens.push_back({{"grq", q}});
            j["generators"].push_back(gens);
            nlohmann::json cols = nlohmann::json::array();
            if (k + 1 < degree_count()) {
                for (auto& col : diff[static_cast<std::size_t>(k)]) {
                    nlohmann::json entries = nlohmann::json::array();
                    for (auto& [tgt, p] : col) entries.push_back({{"tgt", tgt}, {"poly", p.str()}});
                    cols.push_back(entries);
                }
            }
            j["differential"].push_back(cols);
        }
        return j;
    }
};

// ---------------------------------------------------------------------------
// The cube of resolutions.

/// Full-cube complex together with the vertex/label bookkeeping used by the
/// canonical-generator machinery. A generator at vertex u is a labeling of
/// its circles; label bit set means the circle carries X. In reduced
/// complexes the marked circle has no label bit (it carries X-U throughout)
/// and gr_q is shifted up by one.
template <CoefficientField F>
struct CubeComplex {
    GradedChainComplex<F> C;
    LinkDiagram diagram;
    std::vector<Resolution> resolutions; // indexed by vertex word bits
    std::vector<int> vertex_base;        // first generator index within the degree
    std::optional<long> basepoint;
    std::vector<int> marked_circle; // per vertex, reduced complexes only

    int circle_count(std::uint32_t u) const {
        return static_cast<int>(resolutions[u].circles.size());
    }
    int label_slots(std::uint32_t u) const { return circle_count(u) - (basepoint ? 1 : 0); }
    int unmarked_slot(std::uint32_t u, int c) const {
        if (!basepoint) return c;
        int m = marked_circle[u];
        if (c == m) throw std::logic_error("cube: marked circle has no label slot");
        return c < m ? c : c - 1;
    }
    int gen_index(std::uint32_t u, std::uint32_t labels) const {
        return vertex_base[u] + static_cast<int>(labels);
    }
    int degree_offset(std::uint32_t u) const { return static_cast<int>(std::popcount(u)); }
};

namespace detail {

/// The saddle map along cube edge u -> u|2^i, as columns over the label
/// indices of u (entries: target label index at the far vertex, coefficient;
/// the anticommuting edge sign is included unless signless).
template <CoefficientField F>
std::vector<std::vector<std::pair<std::uint32_t, Poly<F>>>>
cube_edge_map(const CubeComplex<F>& cube, std::uint32_t u, int i, bool signless = false) {
    const LinkDiagram& D = cube.diagram;
    std::uint32_t v = u | (1u << i);
    const Resolution& ru = cube.resolutions[u];
    const Resolution& rv = cube.resolutions[v];

    const auto& x = D.crossings()[static_cast<std::size_t>(i)];
    std::vector<int> src_circ, tgt_circ;
    for (int s = 0; s < 4; ++s) {
        int cu = ru.circle_of_edge.at(x.e[static_cast<std::size_t>(s)]);
        int cv = rv.circle_of_edge.at(x.e[static_cast<std::size_t>(s)]);
        if (std::find(src_circ.begin(), src_circ.end(), cu) == src_circ.end())
            src_circ.push_back(cu);
        if (std::find(tgt_circ.begin(), tgt_circ.end(), cv) == tgt_circ.end())
            tgt_circ.push_back(cv);
    }
    std::sort(src_circ.begin(), src_circ.end());
    std::sort(tgt_circ.begin(), tgt_circ.end());
    bool is_merge = src_circ.size() == 2;
    if ((is_merge && tgt_circ.size() != 1) ||
        (!is_merge && (src_circ.size() != 1 || tgt_circ.size() != 2)))
        throw std::logic_error("cube: saddle does not merge or split");

    std::vector<int> tgt_of_src(ru.circles.size(), -1);
    for (std::size_t c = 0; c < ru.circles.size(); ++c) {
        if (std::find(src_circ.begin(), src_circ.end(), static_cast<int>(c)) != src_circ.end())
            continue;
        tgt_of_src[c] = rv.circle_of_edge.at(ru.circles[c].front());
    }

    const bool with_signs = !signless && F::characteristic() != 2;
    F sgn = (with_signs && (std::popcount(u & ((1u << i) - 1u)) % 2 == 1)) ? -F::one() : F::one();

    const bool reduced = cube.basepoint.has_value();
    int mu = reduced ? cube.marked_circle[u] : -1;

    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();

    int slots_u = cube.label_slots(u);
    std::vector<std::vector<std::pair<std::uint32_t, Poly<F>>>> cols(
        static_cast<std::size_t>(1) << slots_u);
    for (std::uint32_t labels = 0; labels < (1u << slots_u); ++labels) {
        auto label_of = [&](int c) -> int { // 0 = basis 1, 1 = basis X, 2 = marked
            if (reduced && c == mu) return 2;
            return (labels >> cube.unmarked_slot(u, c)) & 1;
        };
        struct Out {
            Poly<F> coeff;
            std::vector<int> tgt_label; // aligned with tgt_circ
        };
        std::vector<Out> outs;
        if (is_merge) {
            int la = label_of(src_circ[0]), lb = label_of(src_circ[1]);
            bool marked = la == 2 || lb == 2;
            int other = la == 2 ? lb : la;
            if (marked) {
                outs.push_back({other == 0 ? Poly<F>::one() : Poly<F>::V(), {2}});
            } else if (la == 1 && lb == 1) {
                outs.push_back({upv, {1}});
                outs.push_back({-uv, {0}});
            } else if (la + lb == 1) {
                outs.push_back({Poly<F>::one(), {1}});
            } else {
                outs.push_back({Poly<F>::one(), {0}});
            }
        } else {
            int lc = label_of(src_circ[0]);
            if (lc == 2) {
                int based_pos = rv.circle_of_edge.at(*cube.basepoint);
                int pos0 = tgt_circ[0] == based_pos ? 0 : 1;
                std::vector<int> tl(2);
                tl[static_cast<std::size_t>(pos0)] = 2;
                tl[static_cast<std::size_t>(1 - pos0)] = 1;
                outs.push_back({Poly<F>::one(), tl});
                tl[static_cast<std::size_t>(1 - pos0)] = 0;
                outs.push_back({-Poly<F>::U(), tl});
            } else if (lc == 0) {
                outs.push_back({Poly<F>::one(), {1, 0}});
                outs.push_back({Poly<F>::one(), {0, 1}});
                outs.push_back({-upv, {0, 0}});
            } else {
                outs.push_back({Poly<F>::one(), {1, 1}});
                outs.push_back({-uv, {0, 0}});
            }
        }

        auto& col = cols[labels];
        for (auto& out : outs) {
            std::uint32_t tgt_labels = 0;
            for (std::size_t c = 0; c < ru.circles.size(); ++c) {
                if (tgt_of_src[c] < 0) continue;
                int l = label_of(static_cast<int>(c));
                if (l == 1) tgt_labels |= 1u << cube.unmarked_slot(v, tgt_of_src[c]);
            }
            for (std::size_t t = 0; t < tgt_circ.size(); ++t) {
                int l = out.tgt_label[t];
                if (l == 1) tgt_labels |= 1u << cube.unmarked_slot(v, tgt_circ[t]);
            }
            Poly<F> coeff = out.coeff * sgn;
            if (coeff.is_zero()) continue;
            bool found = false;
            for (auto& [t2, p2] : col)
                if (t2 == tgt_labels) {
                    p2 = p2 + coeff;
                    found = true;
                    break;
                }
            if (!found) col.push_back({tgt_labels, coeff});
        }
        std::erase_if(col, [](const auto& e) { return e.second.is_zero(); });
    }
    return cols;
}

} // namespace detail

/// Build the cube-of-resolutions complex CKh(D), or the reduced subcomplex
/// when a basepoint is given (Khovanov generators whose marked circle carries
/// X-U, with an overall +1 shift of gr_q).
template <CoefficientField F>
CubeComplex<F> build_cube(const LinkDiagram& D, std::optional<long> basepoint = {},
                          int crossing_cap = 12) {
    const int n = D.n();
    if (n > crossing_cap)
        throw std::invalid_argument("build_cube: crossing count exceeds the full-cube cap");

    CubeComplex<F> cube;
    cube.diagram = D;
    cube.basepoint = basepoint;
    const std::uint32_t nv = 1u << n;
    cube.resolutions.reserve(nv);
    for (std::uint32_t u = 0; u < nv; ++u) {
        std::vector<std::uint8_t> word(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) word[static_cast<std::size_t>(i)] = (u >> i) & 1;
        cube.resolutions.push_back(D.resolve(word));
    }
    if (basepoint) {
        LinkDiagram copy = D;
        copy.set_basepoint(*basepoint); // validates the label
        cube.marked_circle.resize(nv);
        for (std::uint32_t u = 0; u < nv; ++u)
            cube.marked_circle[u] = cube.resolutions[u].circle_of_edge.at(*basepoint);
    }

    auto& C = cube.C;
    C.h_min = -D.n_minus();
    C.grq.assign(static_cast<std::size_t>(n + 1), {});
    C.diff.assign(static_cast<std::size_t>(n + 1), {});
    cube.vertex_base.assign(nv, 0);

    const int shift = D.n_plus() - 2 * D.n_minus() + (basepoint ? 1 : 0);
    for (std::uint32_t u = 0; u < nv; ++u) {
        int k = cube.degree_offset(u);
        auto& gq = C.grq[static_cast<std::size_t>(k)];
        cube.vertex_base[u] = static_cast<int>(gq.size());
        int slots = cube.label_slots(u);
        int base = (basepoint ? -1 : 0) + static_cast<int>(std::popcount(u)) + shift;
        for (std::uint32_t labels = 0; labels < (1u << slots); ++labels)
            gq.push_back(base + slots - 2 * static_cast<int>(std::popcount(labels)));
    }
    for (int k = 0; k <= n; ++k)
        C.diff[static_cast<std::size_t>(k)].assign(C.grq[static_cast<std::size_t>(k)].size(), {});

    for (std::uint32_t u = 0; u < nv; ++u) {
        int k = cube.degree_offset(u);
        for (int i = 0; i < n; ++i) {
            if ((u >> i) & 1) continue;
            std::uint32_t v = u | (1u << i);
            auto cols = detail::cube_edge_map(cube, u, i);
            for (std::uint32_t labels = 0; labels < cols.size(); ++labels) {
                int src_index = cube.gen_index(u, labels);
                auto& col =
                    C.diff[static_cast<std::size_t>(k)][static_cast<std::size_t>(src_index)];
                for (auto& [tl, p] : cols[labels]) {
                    int tgt_index = cube.gen_index(v, tl);
                    bool found = false;
                    for (auto& [t2, p2] : col)
                        if (t2 == tgt_index) {
                            p2 = p2 + p;
                            found = true;
                            break;
                        }
                    if (!found) col.push_back({tgt_index, p});
                }
            }
        }
    }
    for (auto& layer : cube.C.diff)
        for (auto& col : layer)
            std::erase_if(col, [](const auto& e) { return e.second.is_zero(); });
    return cube;
}

// ---------------------------------------------------------------------------
// Mirror duality: CKh(D) is isomorphic to the dual of CKh(mirror D), via the
// self-duality isomorphism gamma applied circle-wise at complementary
// vertices (marked circles map by (X-U) -> (X-U)* in the reduced case).
// Away from characteristic two the vertex-wise maps need a consistent sign
// renormalization, which is found by propagation over the cube.

struct DualityReport {
    bool ok = true;
    std::string detail;
};

template <CoefficientField F>
DualityReport verify_mirror_duality(const LinkDiagram& D, std::optional<long> basepoint = {},
                                    int crossing_cap = 12) {
    const int n = D.n();
    CubeComplex<F> A = build_cube<F>(D, basepoint, crossing_cap);
    CubeComplex<F> B = build_cube<F>(D.mirror(), basepoint, crossing_cap);
    const std::uint32_t nv = 1u << n;
    const std::uint32_t full = nv - 1;

    // gamma on a single unmarked factor: label 1 -> X* (coeff 1);
    // label X -> 1* (coeff 1) and X* (coeff U+V).
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();

    // Gamma of generator (u, labels) of A: dual-basis coefficients on the
    // generators of B at the complementary vertex.
    auto gamma_of = [&](std::uint32_t u, std::uint32_t labels) {
        std::uint32_t ub = full & ~u;
        std::map<std::uint32_t, Poly<F>> out; // B labels -> coeff
        out[0] = Poly<F>::one();
        int nc = A.circle_count(u);
        for (int c = 0; c < nc; ++c) {
            long edge = A.resolutions[u].circles[static_cast<std::size_t>(c)].front();
            int cb = B.resolutions[ub].circle_of_edge.at(edge);
            if (basepoint && c == A.marked_circle[u]) continue; // (X-U) -> (X-U)*
            int slot = A.unmarked_slot(u, c);
            int bslot = B.unmarked_slot(ub, cb);
            bool isX = (labels >> slot) & 1;
            std::map<std::uint32_t, Poly<F>> next;
            for (auto& [bl, coeff] : out) {
                if (isX) {
                    next[bl] = next.count(bl) ? next[bl] + coeff : coeff; // 1* factor
                    std::uint32_t blx = bl | (1u << bslot);
                    Poly<F> add = coeff * upv;
                    next[blx] = next.count(blx) ? next[blx] + add : add; // (U+V) X*
                } else {
                    std::uint32_t blx = bl | (1u << bslot);
                    next[blx] = next.count(blx) ? next[blx] + coeff : coeff; // X*
                }
            }
            out = std::move(next);
        }
        return out;
    };

    // Sign renormalization per A-vertex, found by BFS over cube edges.
    std::vector<int> sigma(nv, 0);
    sigma[0] = 1;
    std::vector<std::uint32_t> order(nv);
    for (std::uint32_t u = 0; u < nv; ++u) order[u] = u;
    std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
        return std::popcount(a) != std::popcount(b) ? std::popcount(a) < std::popcount(b) : a < b;
    });

    for (std::uint32_t u : order) {
        for (int i = 0; i < n; ++i) {
            if ((u >> i) & 1) continue;
            std::uint32_t v = u | (1u << i);
            std::uint32_t ub = full & ~u, vb = full & ~v;
            // A-edge map u -> v and B-edge map vb -> ub (vb has bit i clear).
            auto acols = detail::cube_edge_map(A, u, i);
            auto bcols = detail::cube_edge_map(B, vb, i);

            // lhs(g) = Gamma_v(d_A(g)); rhs(g) = d_!(Gamma_u(g)).
            bool fixed = false;
            int eps = 1;
            for (std::uint32_t g = 0; g < acols.size(); ++g) {
                std::map<std::uint32_t, Poly<F>> lhs;
                for (auto& [tl, p] : acols[g])
                    for (auto& [bl, c] : gamma_of(v, tl)) {
                        auto& acc = lhs[bl];
                        acc = acc + p * c;
                        if (acc.is_zero()) lhs.erase(bl);
                    }
                std::map<std::uint32_t, Poly<F>> rhs;
                auto gu = gamma_of(u, g);
                // d_! on the dual basis: (g')* -> sum over B-generators g'' at
                // vb with <d_B g'', g'> coefficient.
                for (std::uint32_t gpp = 0; gpp < bcols.size(); ++gpp)
                    for (auto& [tl, p] : bcols[gpp]) {
                        auto it = gu.find(tl);
                        if (it == gu.end()) continue;
                        auto& acc = rhs[gpp];
                        acc = acc + p * it->second;
                        if (acc.is_zero()) rhs.erase(gpp);
                    }
                if (lhs.empty() && rhs.empty()) continue;
                // lhs must equal +/- rhs uniformly on this edge.
                for (int e : {1, -1}) {
                    if (fixed && e != eps) continue;
                    bool match = lhs.size() == rhs.size();
                    if (match)
                        for (auto& [bl, c] : lhs) {
                            auto it = rhs.find(bl);
                            if (it == rhs.end()) {
                                match = false;
                                break;
                            }
                            Poly<F> want = e == 1 ? it->second : it->second * (-F::one());
                            if (!(c == want)) {
                                match = false;
                                break;
                            }
                        }
                    if (match) {
                        if (!fixed) {
                            fixed = true;
                            eps = e;
                        }
                        goto edge_gen_ok;
                    }
                }
                return {false, "intertwining fails on cube edge (vertex " + std::to_string(u) +
                                   ", crossing " + std::to_string(i) + ", generator " +
                                   std::to_string(g) + ")"};
            edge_gen_ok:;
            }
            int rel = fixed ? eps : 1;
            if (sigma[v] == 0)
                sigma[v] = sigma[u] * rel;
            else if (sigma[v] != sigma[u] * rel)
                return {false, "no consistent vertex sign assignment (vertex " +
                                   std::to_string(v) + ")"};
        }
    }

    // Grading preservation of the assembled map.
    for (std::uint32_t u = 0; u < nv; ++u) {
        std::uint32_t ub = full & ~u;
        int ka = A.degree_offset(u);
        int kb_dual = ka; // complementary vertex lands at the same offset
        for (std::uint32_t g = 0; g < (1u << A.label_slots(u)); ++g) {
            int qa = A.C.grq[static_cast<std::size_t>(ka)]
                           [static_cast<std::size_t>(A.gen_index(u, g))];
            for (auto& [bl, c] : gamma_of(u, g)) {
                int qb = B.C.grq[static_cast<std::size_t>(B.degree_offset(ub))]
                               [static_cast<std::size_t>(B.gen_index(ub, bl))];
                for (auto& [m, coeff] : c.terms())
                    if (-qb - 2 * static_cast<int>(m.total()) != qa)
                        return {false, "gamma is not grading preserving at vertex " +
                                           std::to_string(u)};
            }
        }
        (void)kb_dual;
    }
    return {true, ""};
}

} // namespace equikh
