#pragma once

// Scanning pipeline: the chain complex is built by appending one crossing at
// a time to a tangle complex over the dotted-cobordism category of the
// Frobenius pair, delooping every closed circle, and cancelling unit pivots
// by chain-level Gaussian elimination.
//
// Objects are crossingless tangles: perfect matchings of the current open
// boundary points (plus transient closed circles between a tensor step and
// its deloops). A morphism between two objects reduces, by neck-cutting and
// the sheet relation X^2 = (U+V)X - UV, to an R-linear combination of
// "dot patterns": one disk per overlay cycle of the two matchings, each disk
// dotted at most once. Dots act as multiplication by X; on the sheet that
// carries the basepoint the module is R(X-U), dots act as V, and the sheet
// takes no dot bit.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "equikh/complex.hpp"
#include "equikh/diagram.hpp"

namespace equikh {
namespace bn {

using Point = long;

/// Crossingless tangle: matching on the open boundary plus transient closed
/// circles (keyed by the smallest edge they consumed, for trace replay).
struct ScanObj {
    std::vector<std::pair<Point, Point>> arcs; // a < b, sorted
    std::vector<std::pair<long, bool>> circles; // (key, marked)
    int marked_arc = -1;                        // index into arcs, -1 when none
    int hdeg = 0;                               // raw: number of 1-smoothings
    int qdeg = 0;                               // raw: 1-smoothings + deloop shifts
    bool alive = false;

    bool same_shape(const ScanObj& o) const {
        return arcs == o.arcs && circles.empty() && o.circles.empty() &&
               marked_arc == o.marked_arc && qdeg == o.qdeg;
    }
};

/// One boundary circle of the overlay of two objects.
struct Cycle {
    std::vector<int> a_arcs, b_arcs;
    int a_circle = -1, b_circle = -1;
    bool marked = false;
};

inline std::vector<Cycle> overlay(const ScanObj& a, const ScanObj& b) {
    std::map<Point, std::pair<int, int>> at; // point -> (a-arc, b-arc)
    for (std::size_t i = 0; i < a.arcs.size(); ++i) {
        at[a.arcs[i].first].first = static_cast<int>(i);
        at[a.arcs[i].second].first = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < b.arcs.size(); ++i) {
        at[b.arcs[i].first].second = static_cast<int>(i);
        at[b.arcs[i].second].second = static_cast<int>(i);
    }
    if (a.arcs.size() != b.arcs.size())
        throw std::logic_error("overlay: boundary size mismatch");

    std::vector<Cycle> cycles;
    std::vector<bool> used(a.arcs.size(), false);
    for (std::size_t start = 0; start < a.arcs.size(); ++start) {
        if (used[start]) continue;
        Cycle cy;
        int ia = static_cast<int>(start);
        Point p = a.arcs[start].first;
        do {
            used[static_cast<std::size_t>(ia)] = true;
            cy.a_arcs.push_back(ia);
            if (ia == a.marked_arc) cy.marked = true;
            Point q = a.arcs[static_cast<std::size_t>(ia)].first == p
                          ? a.arcs[static_cast<std::size_t>(ia)].second
                          : a.arcs[static_cast<std::size_t>(ia)].first;
            int ib = at.at(q).second;
            cy.b_arcs.push_back(ib);
            if (ib == b.marked_arc) cy.marked = true;
            Point r = b.arcs[static_cast<std::size_t>(ib)].first == q
                          ? b.arcs[static_cast<std::size_t>(ib)].second
                          : b.arcs[static_cast<std::size_t>(ib)].first;
            ia = at.at(r).first;
            p = r;
        } while (!used[static_cast<std::size_t>(ia)]);
        cycles.push_back(std::move(cy));
    }
    for (std::size_t i = 0; i < a.circles.size(); ++i) {
        Cycle cy;
        cy.a_circle = static_cast<int>(i);
        cy.marked = a.circles[i].second;
        cycles.push_back(cy);
    }
    for (std::size_t i = 0; i < b.circles.size(); ++i) {
        Cycle cy;
        cy.b_circle = static_cast<int>(i);
        cy.marked = b.circles[i].second;
        cycles.push_back(cy);
    }
    return cycles;
}

/// Morphism in canonical form: sum of dot patterns over the overlay cycles.
template <CoefficientField F>
struct Morph {
    std::map<std::uint32_t, Poly<F>> terms;

    bool is_zero() const { return terms.empty(); }
    void add(std::uint32_t mask, const Poly<F>& p) {
        if (p.is_zero()) return;
        auto& slot = terms[mask];
        slot = slot + p;
        if (slot.is_zero()) terms.erase(mask);
    }
    Morph operator+(const Morph& o) const {
        Morph r = *this;
        for (auto& [m, p] : o.terms) r.add(m, p);
        return r;
    }
    Morph operator-() const {
        Morph r;
        for (auto& [m, p] : terms) r.terms[m] = -p;
        return r;
    }
    Morph scaled(const F& c) const {
        Morph r;
        if (c.is_zero()) return r;
        for (auto& [m, p] : terms) r.terms[m] = p * c;
        return r;
    }
    /// c * identity: the all-undotted pattern with a constant coefficient,
    /// between objects of identical shape.
    std::optional<F> unit_scalar() const {
        if (terms.size() != 1) return std::nullopt;
        auto& [m, p] = *terms.begin();
        if (m != 0 || !p.is_constant()) return std::nullopt;
        F c = p.constant_term();
        if (c.is_zero()) return std::nullopt;
        return c;
    }
};

// ---------------------------------------------------------------------------
// Assembly: glue surface pieces, reduce genus and dots, distribute onto the
// result cycles. Shared by composition and the tensor-step extension.

namespace detail {

struct DSU {
    std::vector<int> p;
    explicit DSU(int n) : p(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    }
    int find(int x) {
        while (p[static_cast<std::size_t>(x)] != x)
            x = p[static_cast<std::size_t>(x)] =
                p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
        return x;
    }
    void unite(int a, int b) { p[static_cast<std::size_t>(find(a))] = find(b); }
};

/// a = c0 + c1 X multiplied by X, reduced by X^2 = (U+V)X - UV.
template <CoefficientField F>
std::pair<Poly<F>, Poly<F>> times_x(const std::pair<Poly<F>, Poly<F>>& a) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    return {-(a.second * uv), a.first + a.second * upv};
}

/// Iterated comultiplication of a, distributed over `slots` boundary cycles:
/// returns (dot pattern, coefficient) pairs.
template <CoefficientField F>
std::vector<std::pair<std::uint32_t, Poly<F>>>
distribute(std::pair<Poly<F>, Poly<F>> a, int slots) {
    Poly<F> upv = Poly<F>::U() + Poly<F>::V();
    Poly<F> uv = Poly<F>::U() * Poly<F>::V();
    // state: mask over the first j slots with the remaining algebra element
    std::vector<std::pair<std::uint32_t, std::pair<Poly<F>, Poly<F>>>> state{{0u, a}};
    for (int j = 0; j + 1 < slots; ++j) {
        std::vector<std::pair<std::uint32_t, std::pair<Poly<F>, Poly<F>>>> next;
        for (auto& [mask, el] : state) {
            auto& [c0, c1] = el;
            // dot at slot j: remainder unchanged
            next.push_back({mask | (1u << j), el});
            // no dot: remainder (-(U+V)c0 - UV c1, c0)
            next.push_back({mask, {-(c0 * upv) - c1 * uv, c0}});
        }
        state = std::move(next);
    }
    std::vector<std::pair<std::uint32_t, Poly<F>>> out;
    for (auto& [mask, el] : state) {
        if (!el.second.is_zero()) out.push_back({mask | (1u << (slots - 1)), el.second});
        if (!el.first.is_zero()) out.push_back({mask, el.first});
    }
    return out;
}

/// Context for evaluating one glued cobordism: pieces with unions and arc
/// gluings already applied, result cycles mapped to components.
template <CoefficientField F>
struct Assembly {
    int piece_count = 0;
    DSU dsu{0};
    int arc_gluings = 0;
    std::vector<int> gluings_per_root;     // filled by finish()
    std::vector<char> piece_marked;        // marked sheets (by piece id)
    std::vector<int> cycle_component;      // result cycle -> component root
    std::vector<char> cycle_marked;        // result cycle marked?
    std::vector<int> glue_a, glue_b;       // gluing endpoints for recount

    explicit Assembly(int pieces)
        : piece_count(pieces), dsu(pieces), piece_marked(static_cast<std::size_t>(pieces), 0) {}

    void glue_arc(int a, int b) {
        glue_a.push_back(a);
        glue_b.push_back(b);
        dsu.unite(a, b);
        ++arc_gluings;
    }
    void glue_circle(int a, int b) { dsu.unite(a, b); }

    /// Evaluate one term: dots per piece; returns dot patterns over the
    /// result cycles with coefficients, multiplied by `coeff`.
    std::vector<std::pair<std::uint32_t, Poly<F>>>
    evaluate(const std::vector<int>& piece_dots, Poly<F> coeff) {
        int n_cycles = static_cast<int>(cycle_component.size());
        // collect components
        std::map<int, std::vector<int>> comp_cycles; // root -> cycle ids
        std::map<int, int> comp_pieces, comp_glues, comp_dots;
        std::map<int, bool> comp_marked;
        for (int c = 0; c < n_cycles; ++c)
            comp_cycles[cycle_component[static_cast<std::size_t>(c)]].push_back(c);
        for (int p = 0; p < piece_count; ++p) {
            int r = dsu.find(p);
            comp_pieces[r]++;
            comp_dots[r] += piece_dots[static_cast<std::size_t>(p)];
            if (piece_marked[static_cast<std::size_t>(p)]) comp_marked[r] = true;
        }
        for (std::size_t g = 0; g < glue_a.size(); ++g) comp_glues[dsu.find(glue_a[g])]++;
        for (int c = 0; c < n_cycles; ++c)
            if (cycle_marked[static_cast<std::size_t>(c)])
                comp_marked[cycle_component[static_cast<std::size_t>(c)]] = true;

        Poly<F> vmu = Poly<F>::VmU();
        Poly<F> upv = Poly<F>::U() + Poly<F>::V();

        // per-component factors, then a cartesian product over components
        std::vector<std::pair<std::uint32_t, Poly<F>>> acc{{0u, coeff}};
        for (auto& [root, npieces] : comp_pieces) {
            int glues = comp_glues.count(root) ? comp_glues[root] : 0;
            int chi = npieces - glues;
            auto itc = comp_cycles.find(root);
            int b = itc == comp_cycles.end() ? 0 : static_cast<int>(itc->second.size());
            int dots = comp_dots[root];
            bool marked = comp_marked.count(root) && comp_marked[root];
            int genus2 = 2 - chi - b;
            if (genus2 < 0 || genus2 % 2 != 0)
                throw std::logic_error("assembly: inconsistent genus");
            int genus = genus2 / 2;

            std::vector<std::pair<std::uint32_t, Poly<F>>> factors; // masks over result cycles
            if (marked) {
                // fold dots and handles through X -> V on the marked module
                Poly<F> scal = Poly<F>::one();
                for (int d = 0; d < dots; ++d) scal = scal * Poly<F>::V();
                for (int g = 0; g < genus; ++g) scal = scal * vmu;
                // each unmarked cycle of the component receives X - U
                factors.push_back({0u, scal});
                if (itc != comp_cycles.end())
                    for (int cyc : itc->second) {
                        if (cycle_marked[static_cast<std::size_t>(cyc)]) continue;
                        std::vector<std::pair<std::uint32_t, Poly<F>>> nf;
                        for (auto& [m, c] : factors) {
                            nf.push_back({m, c * (-Poly<F>::U())});
                            nf.push_back({m | (1u << cyc), c});
                        }
                        factors = std::move(nf);
                    }
            } else {
                std::pair<Poly<F>, Poly<F>> a{Poly<F>::one(), Poly<F>::zero()};
                for (int d = 0; d < dots; ++d) a = times_x(a);
                for (int g = 0; g < genus; ++g) {
                    // handle factor m(Delta(1)) = 2X - (U+V)
                    auto ax = times_x(a);
                    a = {ax.first * Poly<F>::constant(2) - a.first * upv,
                         ax.second * Poly<F>::constant(2) - a.second * upv};
                }
                if (b == 0) {
                    factors.push_back({0u, a.second}); // closed: trace
                } else {
                    auto dist = distribute<F>(a, b);
                    const auto& cycs = itc->second;
                    for (auto& [localmask, c] : dist) {
                        std::uint32_t mask = 0;
                        for (int s = 0; s < b; ++s)
                            if ((localmask >> s) & 1)
                                mask |= 1u << cycs[static_cast<std::size_t>(s)];
                        factors.push_back({mask, c});
                    }
                }
            }
            std::vector<std::pair<std::uint32_t, Poly<F>>> next;
            for (auto& [m1, c1] : acc)
                for (auto& [m2, c2] : factors) {
                    Poly<F> c = c1 * c2;
                    if (!c.is_zero()) next.push_back({m1 | m2, c});
                }
            acc = std::move(next);
            if (acc.empty()) break;
        }
        return acc;
    }
};

} // namespace detail

/// Composition g o f of canonical morphisms f: X -> Y, g: Y -> Z.
template <CoefficientField F>
Morph<F> compose(const ScanObj& X, const ScanObj& Y, const ScanObj& Z, const Morph<F>& f,
                 const Morph<F>& g) {
    auto cyXY = overlay(X, Y);
    auto cyYZ = overlay(Y, Z);
    auto cyXZ = overlay(X, Z);
    int nF = static_cast<int>(cyXY.size()), nG = static_cast<int>(cyYZ.size());

    detail::Assembly<F> as(nF + nG);
    for (int i = 0; i < nF; ++i) as.piece_marked[static_cast<std::size_t>(i)] = cyXY[static_cast<std::size_t>(i)].marked;
    for (int i = 0; i < nG; ++i)
        as.piece_marked[static_cast<std::size_t>(nF + i)] = cyYZ[static_cast<std::size_t>(i)].marked;

    // glue along every arc and circle of Y
    std::vector<int> y_arc_in_f(Y.arcs.size(), -1), y_arc_in_g(Y.arcs.size(), -1);
    std::vector<int> y_circ_in_f(Y.circles.size(), -1), y_circ_in_g(Y.circles.size(), -1);
    for (int i = 0; i < nF; ++i) {
        for (int ia : cyXY[static_cast<std::size_t>(i)].b_arcs) y_arc_in_f[static_cast<std::size_t>(ia)] = i;
        if (cyXY[static_cast<std::size_t>(i)].b_circle >= 0)
            y_circ_in_f[static_cast<std::size_t>(cyXY[static_cast<std::size_t>(i)].b_circle)] = i;
    }
    for (int i = 0; i < nG; ++i) {
        for (int ia : cyYZ[static_cast<std::size_t>(i)].a_arcs) y_arc_in_g[static_cast<std::size_t>(ia)] = nF + i;
        if (cyYZ[static_cast<std::size_t>(i)].a_circle >= 0)
            y_circ_in_g[static_cast<std::size_t>(cyYZ[static_cast<std::size_t>(i)].a_circle)] = nF + i;
    }
    for (std::size_t ia = 0; ia < Y.arcs.size(); ++ia)
        as.glue_arc(y_arc_in_f[ia], y_arc_in_g[ia]);
    for (std::size_t ic = 0; ic < Y.circles.size(); ++ic)
        as.glue_circle(y_circ_in_f[ic], y_circ_in_g[ic]);

    // map result cycles to components (via any item)
    as.cycle_component.resize(cyXZ.size());
    as.cycle_marked.resize(cyXZ.size());
    std::vector<int> x_arc_in_f(X.arcs.size(), -1), z_arc_in_g(Z.arcs.size(), -1);
    std::vector<int> x_circ_in_f(X.circles.size(), -1), z_circ_in_g(Z.circles.size(), -1);
    for (int i = 0; i < nF; ++i) {
        for (int ia : cyXY[static_cast<std::size_t>(i)].a_arcs) x_arc_in_f[static_cast<std::size_t>(ia)] = i;
        if (cyXY[static_cast<std::size_t>(i)].a_circle >= 0)
            x_circ_in_f[static_cast<std::size_t>(cyXY[static_cast<std::size_t>(i)].a_circle)] = i;
    }
    for (int i = 0; i < nG; ++i) {
        for (int ia : cyYZ[static_cast<std::size_t>(i)].b_arcs) z_arc_in_g[static_cast<std::size_t>(ia)] = nF + i;
        if (cyYZ[static_cast<std::size_t>(i)].b_circle >= 0)
            z_circ_in_g[static_cast<std::size_t>(cyYZ[static_cast<std::size_t>(i)].b_circle)] = nF + i;
    }
    for (std::size_t c = 0; c < cyXZ.size(); ++c) {
        int piece = -1;
        if (!cyXZ[c].a_arcs.empty())
            piece = x_arc_in_f[static_cast<std::size_t>(cyXZ[c].a_arcs[0])];
        else if (!cyXZ[c].b_arcs.empty())
            piece = z_arc_in_g[static_cast<std::size_t>(cyXZ[c].b_arcs[0])];
        else if (cyXZ[c].a_circle >= 0)
            piece = x_circ_in_f[static_cast<std::size_t>(cyXZ[c].a_circle)];
        else
            piece = z_circ_in_g[static_cast<std::size_t>(cyXZ[c].b_circle)];
        as.cycle_component[c] = as.dsu.find(piece);
        as.cycle_marked[c] = cyXZ[c].marked;
    }

    Morph<F> out;
    for (auto& [mf, pf] : f.terms)
        for (auto& [mg, pg] : g.terms) {
            std::vector<int> dots(static_cast<std::size_t>(nF + nG), 0);
            for (int i = 0; i < nF; ++i) dots[static_cast<std::size_t>(i)] = (mf >> i) & 1;
            for (int i = 0; i < nG; ++i) dots[static_cast<std::size_t>(nF + i)] = (mg >> i) & 1;
            for (auto& [mask, c] : as.evaluate(dots, pf * pg)) out.add(mask, c);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Tensor-step geometry: how one crossing attaches to the processed tangle.

struct SegRef {
    enum Kind : std::uint8_t { ParentArc, Link, CrossArc } kind;
    int index;
};

struct StepGeometry {
    int crossing = 0;
    std::array<Point, 4> slot_point{};   // fresh negative ids or open edge label
    std::array<bool, 4> slot_open{};     // future-facing slot
    // links: (point, point, consumed edge label or -1, contains basepoint)
    struct Link {
        Point a, b;
        long edge = -1;
        bool has_bp = false;
    };
    std::vector<Link> links;
    // crossing arc pairings per smoothing, as slot pairs
    static constexpr int pair0[4] = {3, 2, 1, 0};
    static constexpr int pair1[4] = {1, 0, 3, 2};
};

/// Child object of (parent, eps) plus the segment structure of each new item
/// (arc or circle), used to assemble extended morphisms and transports.
struct ChildData {
    ScanObj obj;
    // per item: arcs first (aligned with obj.arcs), then circles
    std::vector<std::vector<SegRef>> item_segs;
    std::vector<char> item_marked;
    int items() const { return static_cast<int>(item_segs.size()); }
};

namespace detail {

inline StepGeometry step_geometry(const LinkDiagram& D, int c, std::optional<long> bp,
                                  const std::set<Point>& open_points) {
    StepGeometry g;
    g.crossing = c;
    const auto& x = D.crossings()[static_cast<std::size_t>(c)];
    std::map<long, std::vector<int>> kink; // edge -> slots on this crossing
    for (int s = 0; s < 4; ++s) kink[x.e[static_cast<std::size_t>(s)]].push_back(s);
    std::set<long> kink_done;
    for (int s = 0; s < 4; ++s) {
        long e = x.e[static_cast<std::size_t>(s)];
        auto [mc, ms] = D.mate_of(c, s);
        if (mc == c) {
            g.slot_point[static_cast<std::size_t>(s)] = -(4L * c + s + 1);
            g.slot_open[static_cast<std::size_t>(s)] = false;
            if (!kink_done.count(e)) {
                kink_done.insert(e);
                g.links.push_back({-(4L * c + kink[e][0] + 1), -(4L * c + kink[e][1] + 1), e,
                                   bp && *bp == e});
            }
        } else if (open_points.count(e)) {
            g.slot_point[static_cast<std::size_t>(s)] = -(4L * c + s + 1);
            g.slot_open[static_cast<std::size_t>(s)] = false;
            g.links.push_back({-(4L * c + s + 1), e, e, bp && *bp == e});
        } else {
            g.slot_point[static_cast<std::size_t>(s)] = e; // future edge: new open point
            g.slot_open[static_cast<std::size_t>(s)] = true;
        }
    }
    return g;
}

/// Resolve the child tangle of (parent, eps): walk the graph made of parent
/// arcs, this smoothing's two crossing arcs, and the attachment links.
inline ChildData make_child(const ScanObj& parent, const std::vector<long>& parent_arc_edge_min,
                            const StepGeometry& g, int eps, std::optional<long> open_bp) {
    struct Edge {
        Point a, b;
        SegRef seg;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < parent.arcs.size(); ++i)
        edges.push_back({parent.arcs[i].first, parent.arcs[i].second,
                         {SegRef::ParentArc, static_cast<int>(i)}});
    for (std::size_t i = 0; i < g.links.size(); ++i)
        edges.push_back({g.links[i].a, g.links[i].b, {SegRef::Link, static_cast<int>(i)}});
    const int* pr = eps == 0 ? StepGeometry::pair0 : StepGeometry::pair1;
    int cross_arcs = 0;
    for (int s = 0; s < 4; ++s) {
        if (pr[s] < s) continue;
        edges.push_back({g.slot_point[static_cast<std::size_t>(s)],
                         g.slot_point[static_cast<std::size_t>(pr[s])], {SegRef::CrossArc, cross_arcs}});
        ++cross_arcs;
    }

    std::map<Point, std::vector<int>> adj;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[edges[i].a].push_back(static_cast<int>(i));
        adj[edges[i].b].push_back(static_cast<int>(i));
    }
    for (auto& [p, v] : adj)
        if (v.size() > 2) throw std::logic_error("scan: point of degree > 2");

    ChildData cd;
    cd.obj.hdeg = parent.hdeg + eps;
    cd.obj.qdeg = parent.qdeg + eps;
    cd.obj.alive = true;
    cd.obj.circles = parent.circles; // parent circles persist (delooped later)

    std::vector<bool> used(edges.size(), false);
    struct NewItem {
        bool is_circle;
        Point pa = 0, pb = 0;
        std::vector<SegRef> segs;
        bool marked = false;
        long edge_min = -1;
    };
    std::vector<NewItem> items;
    auto walk = [&](int start_edge, Point start_point, bool circle) {
        NewItem it;
        it.is_circle = circle;
        it.pa = start_point;
        int e = start_edge;
        Point p = start_point;
        while (true) {
            used[static_cast<std::size_t>(e)] = true;
            it.segs.push_back(edges[static_cast<std::size_t>(e)].seg);
            if (edges[static_cast<std::size_t>(e)].seg.kind == SegRef::ParentArc) {
                int ia = edges[static_cast<std::size_t>(e)].seg.index;
                if (ia == parent.marked_arc) it.marked = true;
                long em = parent_arc_edge_min[static_cast<std::size_t>(ia)];
                if (em >= 0 && (it.edge_min < 0 || em < it.edge_min)) it.edge_min = em;
            } else if (edges[static_cast<std::size_t>(e)].seg.kind == SegRef::Link) {
                const auto& lk = g.links[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].seg.index)];
                if (lk.has_bp) it.marked = true;
                if (lk.edge >= 0 && (it.edge_min < 0 || lk.edge < it.edge_min))
                    it.edge_min = lk.edge;
            }
            Point q = edges[static_cast<std::size_t>(e)].a == p ? edges[static_cast<std::size_t>(e)].b
                                                                : edges[static_cast<std::size_t>(e)].a;
            auto found = adj.find(q);
            int nxt = -1;
            if (found != adj.end())
                for (int e2 : found->second)
                    if (!used[static_cast<std::size_t>(e2)]) nxt = e2;
            if (nxt < 0) {
                it.pb = q;
                return it;
            }
            e = nxt;
            p = q;
        }
    };

    // paths from open endpoints (degree-1 points)
    std::map<Point, int> degree;
    for (auto& [p, v] : adj) degree[p] = static_cast<int>(v.size());
    for (auto& [p, v] : adj) {
        if (degree[p] != 1) continue;
        int e0 = v[0];
        if (used[static_cast<std::size_t>(e0)]) continue;
        items.push_back(walk(e0, p, false));
    }
    // leftover closed loops
    for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (used[e0]) continue;
        NewItem it = walk(static_cast<int>(e0), edges[e0].a, true);
        it.is_circle = true;
        items.push_back(it);
    }

    // assemble object: arcs sorted canonically, circles appended
    std::vector<std::pair<NewItem*, std::pair<Point, Point>>> arcs;
    for (auto& it : items)
        if (!it.is_circle) {
            Point a = std::min(it.pa, it.pb), b = std::max(it.pa, it.pb);
            arcs.push_back({&it, {a, b}});
        }
    std::sort(arcs.begin(), arcs.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    for (auto& [it, ab] : arcs) {
        if (open_bp && (ab.first == *open_bp || ab.second == *open_bp)) it->marked = true;
        if (it->marked) cd.obj.marked_arc = static_cast<int>(cd.obj.arcs.size());
        cd.obj.arcs.push_back(ab);
        cd.item_segs.push_back(it->segs);
        cd.item_marked.push_back(it->marked);
    }
    // parent circles first (they have no segments this step), then new ones
    std::size_t parent_circles = parent.circles.size();
    for (auto& it : items)
        if (it.is_circle) {
            cd.obj.circles.push_back({it.edge_min, it.marked});
            // placeholder; circle item segments appended after arc items
        }
    // item order: arcs, then parent circles, then new circles
    for (std::size_t i = 0; i < parent_circles; ++i) {
        cd.item_segs.push_back({});
        cd.item_marked.push_back(parent.circles[i].second);
    }
    for (auto& it : items)
        if (it.is_circle) {
            cd.item_segs.push_back(it.segs);
            cd.item_marked.push_back(it.marked);
        }
    return cd;
}

} // namespace detail

/// Extended morphism between the eps_s-child of S and the eps_t-child of T.
/// For eps_s == eps_t pass the old entry f; for the saddle (0 -> 1) pass the
/// identity pattern of S == T.
template <CoefficientField F>
Morph<F> extend_entry(const ScanObj& S, const ScanObj& T, const Morph<F>& f,
                      const StepGeometry& g, int eps_s, int eps_t, const ChildData& cs,
                      const ChildData& ct) {
    auto cyST = overlay(S, T);
    int nF = static_cast<int>(cyST.size());
    int nL = static_cast<int>(g.links.size());
    bool saddle = eps_s != eps_t;
    int n_cross = saddle ? 1 : 2;
    // pieces: [0, nF) old disks, [nF, nF+nL) link strips, then crossing pieces
    detail::Assembly<F> as(nF + nL + n_cross);
    for (int i = 0; i < nF; ++i)
        as.piece_marked[static_cast<std::size_t>(i)] = cyST[static_cast<std::size_t>(i)].marked;

    // ownership maps
    std::map<Point, int> s_arc_at, t_arc_at; // point -> arc index in S/T
    for (std::size_t i = 0; i < S.arcs.size(); ++i) {
        s_arc_at[S.arcs[i].first] = static_cast<int>(i);
        s_arc_at[S.arcs[i].second] = static_cast<int>(i);
    }
    std::vector<int> s_arc_cycle(S.arcs.size()), t_arc_cycle(T.arcs.size());
    std::vector<int> s_circ_cycle(S.circles.size()), t_circ_cycle(T.circles.size());
    for (int i = 0; i < nF; ++i) {
        for (int ia : cyST[static_cast<std::size_t>(i)].a_arcs) s_arc_cycle[static_cast<std::size_t>(ia)] = i;
        for (int ib : cyST[static_cast<std::size_t>(i)].b_arcs) t_arc_cycle[static_cast<std::size_t>(ib)] = i;
        if (cyST[static_cast<std::size_t>(i)].a_circle >= 0)
            s_circ_cycle[static_cast<std::size_t>(cyST[static_cast<std::size_t>(i)].a_circle)] = i;
        if (cyST[static_cast<std::size_t>(i)].b_circle >= 0)
            t_circ_cycle[static_cast<std::size_t>(cyST[static_cast<std::size_t>(i)].b_circle)] = i;
    }
    auto cross_piece = [&](int arcidx, bool /*src side*/) {
        return saddle ? nF + nL : nF + nL + arcidx;
    };
    auto slot_cross_arc = [&](int slot, int eps) {
        const int* pr = eps == 0 ? StepGeometry::pair0 : StepGeometry::pair1;
        // crossing arcs are enumerated in make_child order: slot pairs with pr[s] > s
        int idx = 0;
        for (int s = 0; s < 4; ++s) {
            if (pr[s] < s) continue;
            if (s == slot || pr[s] == slot) return idx;
            ++idx;
        }
        throw std::logic_error("scan: slot without crossing arc");
    };

    // gluings at consumed points
    for (std::size_t li = 0; li < g.links.size(); ++li) {
        const auto& lk = g.links[li];
        int strip = nF + static_cast<int>(li);
        for (Point p : {lk.a, lk.b}) {
            if (p >= 0) {
                // old open point: glue strip to the old cycle through p
                as.glue_arc(strip, s_arc_cycle[static_cast<std::size_t>(s_arc_at.at(p))]);
            } else {
                int slot = static_cast<int>(-(p + 1) - 4L * g.crossing);
                // glue strip to the crossing piece(s) at this slot: for the
                // saddle both sides are one piece; otherwise src and tgt share
                // the same pairing and hence the same strip piece
                if (saddle) {
                    as.glue_arc(strip, nF + nL);
                } else {
                    as.glue_arc(strip, nF + nL + slot_cross_arc(slot, eps_s));
                }
            }
        }
    }
    if (saddle) {
        // the saddle disk is one piece; no internal gluing needed
    } else {
        // nothing: crossing strips are standalone pieces glued via links
    }

    // result cycles over the children
    auto cyC = overlay(cs.obj, ct.obj);
    as.cycle_component.resize(cyC.size());
    as.cycle_marked.resize(cyC.size());
    auto piece_of_seg = [&](const SegRef& seg, bool src_side, int eps) {
        switch (seg.kind) {
        case SegRef::ParentArc:
            return src_side ? s_arc_cycle[static_cast<std::size_t>(seg.index)]
                            : t_arc_cycle[static_cast<std::size_t>(seg.index)];
        case SegRef::Link:
            return nF + seg.index;
        case SegRef::CrossArc:
            return cross_piece(seg.index, src_side);
        }
        throw std::logic_error("unreachable");
        (void)eps;
    };
    for (std::size_t cyc = 0; cyc < cyC.size(); ++cyc) {
        int piece = -1;
        const Cycle& cy = cyC[cyc];
        if (!cy.a_arcs.empty()) {
            const auto& segs = cs.item_segs[static_cast<std::size_t>(cy.a_arcs[0])];
            piece = piece_of_seg(segs.at(0), true, eps_s);
        } else if (!cy.b_arcs.empty()) {
            const auto& segs = ct.item_segs[static_cast<std::size_t>(cy.b_arcs[0])];
            piece = piece_of_seg(segs.at(0), false, eps_t);
        } else if (cy.a_circle >= 0) {
            std::size_t item = cs.obj.arcs.size() + static_cast<std::size_t>(cy.a_circle);
            const auto& segs = cs.item_segs[item];
            if (segs.empty()) // parent circle: its old overlay cycle
                piece = s_circ_cycle[static_cast<std::size_t>(cy.a_circle)];
            else
                piece = piece_of_seg(segs.at(0), true, eps_s);
        } else {
            std::size_t item = ct.obj.arcs.size() + static_cast<std::size_t>(cy.b_circle);
            const auto& segs = ct.item_segs[item];
            if (segs.empty())
                piece = t_circ_cycle[static_cast<std::size_t>(cy.b_circle)];
            else
                piece = piece_of_seg(segs.at(0), false, eps_t);
        }
        as.cycle_component[cyc] = as.dsu.find(piece);
        as.cycle_marked[cyc] = cy.marked;
    }

    Morph<F> out;
    for (auto& [mf, pf] : f.terms) {
        std::vector<int> dots(static_cast<std::size_t>(as.piece_count), 0);
        for (int i = 0; i < nF; ++i) dots[static_cast<std::size_t>(i)] = (mf >> i) & 1;
        for (auto& [mask, c] : as.evaluate(dots, pf)) out.add(mask, c);
    }
    return out;
}

} // namespace bn
} // namespace equikh
