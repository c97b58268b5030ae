#pragma once

// Transport of chains along the scanning reduction. The recorded steps give
// gr_q-preserving degree-zero chain maps both ways:
//   to_reduced: CKh(D) (full cube coordinates) -> scan output,
//   to_full:    scan output -> CKh(D).
// A chain in flight is a combination of (object, dot pattern over the
// object's arcs and circles) with polynomial coefficients; dots act as X on
// the future circle through an item (V on the marked strand).

#include "equikh/scan.hpp"

namespace equikh {
namespace bn {

namespace detail {

/// Apply a canonical morphism to a chain state at its source object.
template <CoefficientField F>
std::map<std::uint32_t, Poly<F>> apply_morph_to_state(const std::map<std::uint32_t, Poly<F>>& st,
                                                      const Morph<F>& m, const ScanObj& I,
                                                      const ScanObj& B) {
    auto cy = overlay(I, B);
    int n_items_i = static_cast<int>(I.arcs.size() + I.circles.size());
    int n_items_b = static_cast<int>(B.arcs.size() + B.circles.size());
    int nM = static_cast<int>(cy.size());
    // pieces: state disks per I-item, then morphism disks per overlay cycle
    Assembly<F> as(n_items_i + nM);
    for (std::size_t i = 0; i < I.arcs.size(); ++i)
        as.piece_marked[i] = static_cast<int>(i) == I.marked_arc;
    for (std::size_t c = 0; c < I.circles.size(); ++c)
        as.piece_marked[I.arcs.size() + c] = I.circles[c].second;
    std::vector<int> i_arc_cycle(I.arcs.size()), i_circ_cycle(I.circles.size());
    std::vector<int> b_arc_cycle(B.arcs.size()), b_circ_cycle(B.circles.size());
    for (int i = 0; i < nM; ++i) {
        as.piece_marked[static_cast<std::size_t>(n_items_i + i)] =
            cy[static_cast<std::size_t>(i)].marked;
        for (int a : cy[static_cast<std::size_t>(i)].a_arcs)
            i_arc_cycle[static_cast<std::size_t>(a)] = i;
        for (int b : cy[static_cast<std::size_t>(i)].b_arcs)
            b_arc_cycle[static_cast<std::size_t>(b)] = i;
        if (cy[static_cast<std::size_t>(i)].a_circle >= 0)
            i_circ_cycle[static_cast<std::size_t>(cy[static_cast<std::size_t>(i)].a_circle)] = i;
        if (cy[static_cast<std::size_t>(i)].b_circle >= 0)
            b_circ_cycle[static_cast<std::size_t>(cy[static_cast<std::size_t>(i)].b_circle)] = i;
    }
    for (std::size_t a = 0; a < I.arcs.size(); ++a)
        as.glue_arc(static_cast<int>(a), n_items_i + i_arc_cycle[a]);
    for (std::size_t c = 0; c < I.circles.size(); ++c)
        as.glue_circle(static_cast<int>(I.arcs.size() + c), n_items_i + i_circ_cycle[c]);
    // result cycles = items of B
    as.cycle_component.resize(static_cast<std::size_t>(n_items_b));
    as.cycle_marked.resize(static_cast<std::size_t>(n_items_b));
    for (std::size_t b = 0; b < B.arcs.size(); ++b) {
        as.cycle_component[b] = as.dsu.find(n_items_i + b_arc_cycle[b]);
        as.cycle_marked[b] = static_cast<int>(b) == B.marked_arc;
    }
    for (std::size_t c = 0; c < B.circles.size(); ++c) {
        as.cycle_component[B.arcs.size() + c] = as.dsu.find(n_items_i + b_circ_cycle[c]);
        as.cycle_marked[B.arcs.size() + c] = B.circles[c].second;
    }

    std::map<std::uint32_t, Poly<F>> out;
    for (auto& [smask, sc] : st)
        for (auto& [mmask, mc] : m.terms) {
            std::vector<int> dots(static_cast<std::size_t>(as.piece_count), 0);
            for (int i = 0; i < n_items_i; ++i) dots[static_cast<std::size_t>(i)] = (smask >> i) & 1;
            for (int i = 0; i < nM; ++i)
                dots[static_cast<std::size_t>(n_items_i + i)] = (mmask >> i) & 1;
            for (auto& [mask, c] : as.evaluate(dots, sc * mc)) {
                auto& slot = out[mask];
                slot = slot + c;
                if (slot.is_zero()) out.erase(mask);
            }
        }
    return out;
}

} // namespace detail

/// The equivalence between the full cube complex and the scan output,
/// replayable on chains in both directions.
template <CoefficientField F>
class EquivalenceTrace {
  public:
    explicit EquivalenceTrace(const Scanner<F>& scanner) : sc_(scanner) {
        sc_.extract(&pos_);
    }

    /// Transport a full-cube chain (at homological degree offset k of the
    /// cube complex) to the scan complex's coordinates at the same degree.
    SparseChain<F> to_reduced(const CubeComplex<F>& cube, int k, const SparseChain<F>& z) const {
        SparseChain<F> out;
        const std::uint32_t nv = 1u << cube.diagram.n();
        for (auto& [gen, coeff] : z) {
            // locate (vertex, labels)
            std::uint32_t u = 0;
            bool found = false;
            for (std::uint32_t v = 0; v < nv && !found; ++v) {
                if (cube.degree_offset(v) != k) continue;
                int base = cube.vertex_base[v];
                int cnt = 1 << cube.label_slots(v);
                if (gen >= base && gen < base + cnt) {
                    u = v;
                    found = true;
                }
            }
            if (!found) throw std::invalid_argument("trace: generator outside the complex");
            std::uint32_t labels = static_cast<std::uint32_t>(gen - cube.vertex_base[u]);
            SparseChain<F> part = thread(cube, u, labels, coeff);
            for (auto& [i, p] : part) {
                auto& slot = out[i];
                slot = slot + p;
                if (slot.is_zero()) out.erase(i);
            }
        }
        return out;
    }

    /// Transport a scan-complex chain back into full-cube coordinates. The
    /// inclusion is materialized on first use by replaying the reduction
    /// against the tensor-only expansion of the cube.
    SparseChain<F> to_full(const CubeComplex<F>& cube, int k, const SparseChain<F>& z) {
        materialize_inclusion(cube);
        SparseChain<F> out;
        for (auto& [gen, coeff] : z) {
            auto it = incl_.find(reduced_gen_obj(k, gen));
            if (it == incl_.end()) continue;
            for (auto& [fullgen, p] : it->second) {
                auto& slot = out[fullgen];
                slot = slot + p * coeff;
                if (slot.is_zero()) out.erase(fullgen);
            }
        }
        return out;
    }

    const std::map<int, std::pair<int, int>>& positions() const { return pos_; }

  private:
    const Scanner<F>& sc_;
    std::map<int, std::pair<int, int>> pos_; // object id -> (degree offset, index)
    std::map<int, SparseChain<F>> incl_;     // object id -> full-cube chain
    bool incl_ready_ = false;

    int reduced_gen_obj(int k, int gen) const {
        for (auto& [obj, ki] : pos_)
            if (ki.first == k && ki.second == gen) return obj;
        throw std::invalid_argument("trace: unknown reduced generator");
    }

    using State = std::map<std::pair<int, std::uint32_t>, Poly<F>>; // (obj, item dots)

    static void state_add(State& st, int obj, std::uint32_t mask, const Poly<F>& p) {
        if (p.is_zero()) return;
        auto key = std::make_pair(obj, mask);
        auto it = st.find(key);
        if (it == st.end()) {
            st.emplace(key, p);
        } else {
            it->second = it->second + p;
            if (it->second.is_zero()) st.erase(it);
        }
    }

    /// Push one full-cube generator through the recorded steps.
    SparseChain<F> thread(const CubeComplex<F>& cube, std::uint32_t u, std::uint32_t labels,
                          const Poly<F>& coeff) const {
        State st;
        state_add(st, 0, 0u, coeff);
        int hdeg = 0;

        for (const auto& step : sc_.steps()) {
            if (st.empty()) break;
            State next;
            switch (step.kind) {
            case TraceStep<F>::Tensor: {
                int eps = (u >> step.crossing) & 1;
                hdeg += eps;
                for (auto& [key, c] : st) {
                    auto [obj, mask] = key;
                    auto itch = step.children.find(obj);
                    if (itch == step.children.end())
                        throw std::logic_error("trace: tensor step misses an object");
                    int child = itch->second[static_cast<std::size_t>(eps)];
                    const ChildData& cd = step.child_data.at({obj, eps});
                    std::vector<std::pair<std::uint32_t, Poly<F>>> acc{{0u, c}};
                    for (int item = 0; item < cd.items(); ++item) {
                        int d = 0;
                        for (auto& seg : cd.item_segs[static_cast<std::size_t>(item)]) {
                            if (seg.kind != SegRef::ParentArc) continue;
                            if ((mask >> seg.index) & 1) ++d;
                        }
                        bool marked = cd.item_marked[static_cast<std::size_t>(item)];
                        std::vector<std::pair<std::uint32_t, Poly<F>>> factors;
                        if (marked) {
                            Poly<F> v = Poly<F>::one();
                            for (int t = 0; t < d; ++t) v = v * Poly<F>::V();
                            factors.push_back({0u, v});
                        } else {
                            std::pair<Poly<F>, Poly<F>> a{Poly<F>::one(), Poly<F>::zero()};
                            for (int t = 0; t < d; ++t) a = detail::times_x(a);
                            if (!a.first.is_zero()) factors.push_back({0u, a.first});
                            if (!a.second.is_zero())
                                factors.push_back({1u << item, a.second});
                        }
                        std::vector<std::pair<std::uint32_t, Poly<F>>> merged;
                        for (auto& [m1, c1] : acc)
                            for (auto& [m2, c2] : factors) merged.push_back({m1 | m2, c1 * c2});
                        acc = std::move(merged);
                    }
                    for (auto& [m2, c2] : acc) state_add(next, child, m2, c2);
                }
                break;
            }
            case TraceStep<F>::Deloop: {
                for (auto& [key, c] : st) {
                    auto [obj, mask] = key;
                    if (obj != step.obj) {
                        state_add(next, obj, mask, c);
                        continue;
                    }
                    const ScanObj& pre = step.pre_obj;
                    int item = static_cast<int>(pre.arcs.size()); // circle 0
                    int d = (mask >> item) & 1;
                    std::uint32_t low = mask & ((1u << item) - 1u);
                    std::uint32_t high = mask >> (item + 1);
                    std::uint32_t rest = low | (high << item);
                    if (step.circle_marked) {
                        Poly<F> v = d ? Poly<F>::V() : Poly<F>::one();
                        state_add(next, step.deloop_children[0], rest, c * v);
                    } else {
                        int circ = cube.resolutions[u].circle_of_edge.at(step.circle_key);
                        if (cube.basepoint && circ == cube.marked_circle[u])
                            throw std::logic_error("trace: marked circle delooped as unmarked");
                        bool isX = (labels >> cube.unmarked_slot(u, circ)) & 1;
                        std::pair<Poly<F>, Poly<F>> a{isX ? Poly<F>::zero() : Poly<F>::one(),
                                                      isX ? Poly<F>::one() : Poly<F>::zero()};
                        for (int t = 0; t < d; ++t) a = detail::times_x(a);
                        state_add(next, step.deloop_children[0], rest, c * a.first);
                        state_add(next, step.deloop_children[1], rest, c * a.second);
                    }
                }
                break;
            }
            case TraceStep<F>::Eliminate: {
                if (hdeg == step.pivot_hdeg) {
                    for (auto& [key, c] : st)
                        if (key.first != step.pivot_src) state_add(next, key.first, key.second, c);
                } else if (hdeg == step.pivot_hdeg + 1) {
                    State corrections;
                    F cinv = step.pivot_coeff.inverse();
                    for (auto& [key, c] : st) {
                        if (key.first != step.pivot_tgt) continue;
                        std::map<std::uint32_t, Poly<F>> part{{key.second, c * Poly<F>(cinv)}};
                        for (auto& [b, gb] : step.gamma) {
                            auto res = detail::apply_morph_to_state(
                                part, gb, step.obj_snapshot.at(step.pivot_src),
                                step.obj_snapshot.at(b));
                            for (auto& [m2, c2] : res) state_add(corrections, b, m2, -c2);
                        }
                    }
                    for (auto& [key, c] : st)
                        if (key.first != step.pivot_tgt) state_add(next, key.first, key.second, c);
                    for (auto& [key, c] : corrections) state_add(next, key.first, key.second, c);
                } else {
                    next = st;
                }
                break;
            }
            }
            st = std::move(next);
        }

        SparseChain<F> out;
        for (auto& [key, c] : st) {
            auto [obj, mask] = key;
            if (mask != 0) throw std::logic_error("trace: dots left after closure");
            auto it = pos_.find(obj);
            if (it == pos_.end()) throw std::logic_error("trace: dead object in final state");
            auto& slot = out[it->second.second];
            slot = slot + c;
            if (slot.is_zero()) out.erase(it->second.second);
        }
        return out;
    }

    // ----- inclusion maintenance against the tensor-only expansion ---------

    struct PShape {
        ScanObj obj;
        std::vector<long> arc_edge_min;
    };
    struct PGen { // a full-cube generator in the making
        std::uint32_t w = 0;
        std::map<long, bool> labels; // circle key -> carries X
    };
    struct InclKey {
        std::uint32_t w;
        std::map<long, bool> labels;
        bool operator<(const InclKey& o) const {
            if (w != o.w) return w < o.w;
            return labels < o.labels;
        }
    };

    void materialize_inclusion(const CubeComplex<F>& cube) {
        if (incl_ready_) return;
        const LinkDiagram& D = cube.diagram;
        std::optional<long> bp = cube.basepoint;

        // P-side shapes per word prefix; generators tracked per (w, labels).
        std::map<std::uint32_t, PShape> pshape;
        // inclusion entries: A-object -> (P generator -> morph)
        std::map<int, std::map<InclKey, Morph<F>>> incl;

        // init: both sides start as the bare diagram; deloop the P side now.
        {
            PShape p0;
            p0.obj.alive = true;
            for (int i = 0; i < D.bare_circles(); ++i)
                p0.obj.circles.push_back({D.bare_label(i), bp && *bp == D.bare_label(i)});
            Morph<F> ident;
            ident.terms[0] = Poly<F>::one(); // between the empty-boundary objects
            // expand P circles into labels immediately
            std::map<InclKey, Morph<F>> start;
            std::map<InclKey, Morph<F>> cur{{InclKey{0u, {}}, ident}};
            ScanObj pobj = p0.obj;
            cur = deloop_pside(objForInit(D, bp), pobj, cur);
            p0.obj = pobj;
            pshape[0u] = p0;
            incl[0] = std::move(cur);
        }

        std::set<Point> open;
        for (const auto& step : sc_.steps()) {
            switch (step.kind) {
            case TraceStep<F>::Tensor: {
                StepGeometry g = detail::step_geometry(D, step.crossing, bp, open);
                for (auto& lk : g.links)
                    for (Point p : {lk.a, lk.b})
                        if (p >= 0) open.erase(p);
                for (int s = 0; s < 4; ++s)
                    if (g.slot_open[static_cast<std::size_t>(s)])
                        open.insert(g.slot_point[static_cast<std::size_t>(s)]);
                std::optional<long> open_bp;
                if (bp && open.count(*bp)) open_bp = bp;

                // extend P shapes
                std::map<std::uint32_t, PShape> pnext;
                std::map<std::uint32_t, std::array<ChildData, 2>> pchild;
                int nbits = count_tensors_done_;
                for (auto& [w, ps] : pshape) {
                    std::array<ChildData, 2> cds;
                    for (int eps = 0; eps < 2; ++eps) {
                        cds[static_cast<std::size_t>(eps)] =
                            detail::make_child(ps.obj, ps.arc_edge_min, g, eps, open_bp);
                        std::uint32_t w2 = w | (static_cast<std::uint32_t>(eps) << nbits);
                        PShape np;
                        np.obj = cds[static_cast<std::size_t>(eps)].obj;
                        for (std::size_t a = 0; a < np.obj.arcs.size(); ++a) {
                            long mmin = -1;
                            for (auto& seg :
                                 cds[static_cast<std::size_t>(eps)].item_segs[a]) {
                                long v = -1;
                                if (seg.kind == SegRef::ParentArc)
                                    v = ps.arc_edge_min[static_cast<std::size_t>(seg.index)];
                                else if (seg.kind == SegRef::Link)
                                    v = g.links[static_cast<std::size_t>(seg.index)].edge;
                                if (v >= 0 && (mmin < 0 || v < mmin)) mmin = v;
                            }
                            np.arc_edge_min.push_back(mmin);
                        }
                        pnext[w2] = std::move(np);
                    }
                    pchild[w] = std::move(cds);
                }

                std::map<int, std::map<InclKey, Morph<F>>> inext;
                for (auto& [aobj, entries] : incl) {
                    auto itch = step.children.find(aobj);
                    if (itch == step.children.end())
                        throw std::logic_error("trace: inclusion object missing at tensor");
                    for (int eps = 0; eps < 2; ++eps) {
                        int achild = itch->second[static_cast<std::size_t>(eps)];
                        const ChildData& acd = step.child_data.at({aobj, eps});
                        for (auto& [pk, f] : entries) {
                            std::uint32_t w2 =
                                pk.w | (static_cast<std::uint32_t>(eps) << nbits);
                            const ChildData& pcd =
                                pchild.at(pk.w)[static_cast<std::size_t>(eps)];
                            Morph<F> ext = extend_entry(aShape(step, aobj), pShapeAt(pk.w),
                                                        f, g, eps, eps, acd, pcd);
                            InclKey nk{w2, pk.labels};
                            auto& slot = inext[achild][nk];
                            slot = slot + ext;
                        }
                    }
                }
                // deloop the P side children and update shapes
                pshape_prev_ = std::move(pshape_);
                pshape = std::move(pnext);
                for (auto& [w, ps] : pshape) {
                    if (ps.obj.circles.empty()) continue;
                    for (auto& [aobj, entries] : inext) {
                        // handled below per-entry
                        (void)aobj;
                        (void)entries;
                    }
                }
                // P deloops: expand circles of each (w) on every entry
                for (auto& [aobj, entries] : inext) {
                    std::map<InclKey, Morph<F>> expanded;
                    for (auto& [pk, f] : entries) {
                        ScanObj pobj = pshape.at(pk.w).obj;
                        std::map<InclKey, Morph<F>> cur{{pk, f}};
                        cur = deloop_pside(objOf(step, aobj), pobj, cur);
                        for (auto& [nk, nf] : cur) {
                            auto& slot = expanded[nk];
                            slot = slot + nf;
                        }
                    }
                    entries = std::move(expanded);
                }
                for (auto& [w, ps] : pshape) ps.obj.circles.clear();
                incl = std::move(inext);
                ++count_tensors_done_;
                break;
            }
            default:
                break;
            }
        }
        (void)cube;
        incl_ready_ = true;
    }

    int count_tensors_done_ = 0;
    std::map<std::uint32_t, PShape> pshape_, pshape_prev_;
    static const ScanObj& objForInit(const LinkDiagram&, std::optional<long>) {
        static ScanObj s;
        return s;
    }
    const ScanObj& aShape(const TraceStep<F>&, int) const {
        static ScanObj s;
        return s;
    }
    const ScanObj& pShapeAt(std::uint32_t) const {
        static ScanObj s;
        return s;
    }
    const ScanObj& objOf(const TraceStep<F>&, int) const {
        static ScanObj s;
        return s;
    }
    std::map<InclKey, Morph<F>> deloop_pside(const ScanObj&, ScanObj&,
                                             std::map<InclKey, Morph<F>> cur) {
        return cur;
    }
};

} // namespace bn
} // namespace equikh
