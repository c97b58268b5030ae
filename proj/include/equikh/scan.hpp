#pragma once

#include <array>
#include <set>

#include "equikh/bn_scan.hpp"
#include "equikh/pipeline.hpp"

namespace equikh {

namespace bn {

/// Reduction step records. They carry enough structure to transport chains
/// between the full cube and the scan output (the equivalence trace).
template <CoefficientField F>
struct TraceStep {
    enum Kind { Tensor, Deloop, Eliminate } kind = Tensor;
    // Tensor
    int crossing = -1;
    std::map<int, std::array<int, 2>> children;          // parent -> child ids by smoothing
    std::map<std::pair<int, int>, ChildData> child_data; // (parent, eps)
    // Deloop
    int obj = -1;
    long circle_key = -1;
    bool circle_marked = false;
    ScanObj pre_obj;
    std::array<int, 2> deloop_children{-1, -1}; // [plus, minus]; marked: [child, -1]
    // Eliminate
    int pivot_src = -1, pivot_tgt = -1;
    F pivot_coeff = F::zero();
    int pivot_hdeg = 0;
    std::vector<std::pair<int, Morph<F>>> delta; // entries a -> j (a != i)
    std::vector<std::pair<int, Morph<F>>> gamma; // entries i -> b (b != j)
    std::map<int, ScanObj> obj_snapshot;
};

/// Scanning engine: crossings are appended in input order; every closed
/// circle is delooped and every unit pivot eliminated before the next
/// crossing arrives.
template <CoefficientField F>
class Scanner {
  public:
    Scanner(const LinkDiagram& D, std::optional<long> basepoint, bool with_trace = false)
        : D_(D), bp_(basepoint), trace_(with_trace) {
        if (bp_) {
            LinkDiagram copy = D_;
            copy.set_basepoint(*bp_); // validates
        }
        init();
        for (int c = 0; c < D_.n(); ++c) {
            tensor_step(c);
            debug_dump("tensor");
            deloop_all();
            debug_dump("deloop");
            eliminate_all();
            debug_dump("elim");
        }
        eliminate_all();
    }

    const std::vector<ScanObj>& objects() const { return objs_; }
    const std::vector<TraceStep<F>>& steps() const { return steps_; }
    const LinkDiagram& diagram() const { return D_; }
    std::optional<long> basepoint() const { return bp_; }

    /// The reduced complex, with the global homological/quantum shifts of the
    /// cube applied.
    GradedChainComplex<F> extract(std::map<int, std::pair<int, int>>* index_of_obj = nullptr) const {
        GradedChainComplex<F> C;
        int hmin = 0, hmax = 0;
        bool first = true;
        for (std::size_t i = 0; i < objs_.size(); ++i) {
            if (!objs_[i].alive) continue;
            if (!objs_[i].arcs.empty() || !objs_[i].circles.empty())
                throw std::logic_error("scan: extraction before the tangle is closed");
            int h = objs_[i].hdeg;
            if (first || h < hmin) hmin = h;
            if (first || h > hmax) hmax = h;
            first = false;
        }
        if (first) throw std::logic_error("scan: empty complex");
        C.h_min = hmin - D_.n_minus();
        int K = hmax - hmin + 1;
        C.grq.assign(static_cast<std::size_t>(K), {});
        C.diff.assign(static_cast<std::size_t>(K), {});
        const int qshift = D_.n_plus() - 2 * D_.n_minus() + (bp_ ? 1 : 0);
        std::map<int, std::pair<int, int>> pos;
        for (std::size_t i = 0; i < objs_.size(); ++i) {
            if (!objs_[i].alive) continue;
            int k = objs_[i].hdeg - hmin;
            pos[static_cast<int>(i)] = {k,
                                        static_cast<int>(C.grq[static_cast<std::size_t>(k)].size())};
            C.grq[static_cast<std::size_t>(k)].push_back(objs_[i].qdeg + qshift);
        }
        for (int k = 0; k < K; ++k)
            C.diff[static_cast<std::size_t>(k)].assign(C.grq[static_cast<std::size_t>(k)].size(),
                                                       {});
        for (std::size_t i = 0; i < objs_.size(); ++i) {
            if (!objs_[i].alive) continue;
            auto [k, src] = pos[static_cast<int>(i)];
            for (auto& [j, m] : out_[i]) {
                if (m.is_zero()) continue;
                if (m.terms.size() != 1 || m.terms.begin()->first != 0)
                    throw std::logic_error("scan: non-scalar morphism after closure");
                auto [k2, tgt] = pos.at(j);
                if (k2 != k + 1) throw std::logic_error("scan: differential skips a degree");
                C.diff[static_cast<std::size_t>(k)][static_cast<std::size_t>(src)].push_back(
                    {tgt, m.terms.begin()->second});
            }
        }
        if (index_of_obj) *index_of_obj = pos;
        return C;
    }

  private:
    LinkDiagram D_;
    std::optional<long> bp_;
    bool trace_;
    std::set<Point> open_;
    std::vector<ScanObj> objs_;
    std::vector<std::vector<long>> arc_edge_min_;
    std::vector<std::map<int, Morph<F>>> out_, in_;
    std::vector<TraceStep<F>> steps_;

    void debug_dump(const char* phase) const {
#ifdef EQUIKH_SCAN_DEBUG
        std::printf("== %s\n", phase);
        for (std::size_t i = 0; i < objs_.size(); ++i) {
            if (!objs_[i].alive) continue;
            std::printf("obj %zu h=%d q=%d arcs=%zu circ=%zu\n", i, objs_[i].hdeg, objs_[i].qdeg,
                        objs_[i].arcs.size(), objs_[i].circles.size());
            for (auto& [j, m] : out_[i]) {
                std::printf("  ->%d :", j);
                for (auto& [mask, pp] : m.terms) std::printf(" [%u]%s;", mask, pp.str().c_str());
                std::printf("\n");
            }
        }
#else
        (void)phase;
#endif
    }

    int new_obj(ScanObj o, std::vector<long> edge_min) {
        objs_.push_back(std::move(o));
        arc_edge_min_.push_back(std::move(edge_min));
        out_.emplace_back();
        in_.emplace_back();
        return static_cast<int>(objs_.size()) - 1;
    }

    void add_entry(int i, int j, Morph<F> m) {
        if (m.is_zero()) return;
        auto it = out_[static_cast<std::size_t>(i)].find(j);
        if (it == out_[static_cast<std::size_t>(i)].end()) {
            out_[static_cast<std::size_t>(i)][j] = m;
            in_[static_cast<std::size_t>(j)][i] = std::move(m);
        } else {
            it->second = it->second + m;
            if (it->second.is_zero()) {
                out_[static_cast<std::size_t>(i)].erase(j);
                in_[static_cast<std::size_t>(j)].erase(i);
            } else {
                in_[static_cast<std::size_t>(j)][i] = it->second;
            }
        }
    }

    void kill(int i) {
        objs_[static_cast<std::size_t>(i)].alive = false;
        for (auto& [j, m] : out_[static_cast<std::size_t>(i)])
            in_[static_cast<std::size_t>(j)].erase(i);
        for (auto& [j, m] : in_[static_cast<std::size_t>(i)])
            out_[static_cast<std::size_t>(j)].erase(i);
        out_[static_cast<std::size_t>(i)].clear();
        in_[static_cast<std::size_t>(i)].clear();
    }

    void init() {
        ScanObj start;
        start.alive = true;
        for (int i = 0; i < D_.bare_circles(); ++i) {
            long lbl = D_.bare_label(i);
            start.circles.push_back({lbl, bp_ && *bp_ == lbl});
        }
        new_obj(std::move(start), {});
        deloop_all();
        eliminate_all();
    }

    void tensor_step(int c) {
        StepGeometry g = detail::step_geometry(D_, c, bp_, open_);
        for (auto& lk : g.links)
            for (Point p : {lk.a, lk.b})
                if (p >= 0) open_.erase(p);
        for (int s = 0; s < 4; ++s)
            if (g.slot_open[static_cast<std::size_t>(s)])
                open_.insert(g.slot_point[static_cast<std::size_t>(s)]);
        std::optional<long> open_bp;
        if (bp_ && open_.count(*bp_)) open_bp = bp_;

        TraceStep<F> step;
        step.kind = TraceStep<F>::Tensor;
        step.crossing = c;

        std::vector<int> old_ids;
        for (std::size_t i = 0; i < objs_.size(); ++i)
            if (objs_[i].alive) old_ids.push_back(static_cast<int>(i));

        std::map<std::pair<int, int>, int> child_id;
        std::map<std::pair<int, int>, ChildData> child_data;
        for (int i : old_ids) {
            for (int eps = 0; eps < 2; ++eps) {
                ChildData cd = detail::make_child(objs_[static_cast<std::size_t>(i)],
                                                  arc_edge_min_[static_cast<std::size_t>(i)], g,
                                                  eps, open_bp);
                std::vector<long> em;
                for (std::size_t a = 0; a < cd.obj.arcs.size(); ++a) {
                    long m = -1;
                    for (auto& seg : cd.item_segs[a]) {
                        long v = -1;
                        if (seg.kind == SegRef::ParentArc)
                            v = arc_edge_min_[static_cast<std::size_t>(i)]
                                             [static_cast<std::size_t>(seg.index)];
                        else if (seg.kind == SegRef::Link)
                            v = g.links[static_cast<std::size_t>(seg.index)].edge;
                        if (v >= 0 && (m < 0 || v < m)) m = v;
                    }
                    em.push_back(m);
                }
                int id = new_obj(cd.obj, std::move(em));
                child_id[{i, eps}] = id;
                child_data[{i, eps}] = std::move(cd);
            }
        }

        const bool with_signs = F::characteristic() != 2;
        for (int i : old_ids) {
            {
                Morph<F> idm;
                idm.terms[0] = Poly<F>::one();
                Morph<F> sad = extend_entry(objs_[static_cast<std::size_t>(i)],
                                            objs_[static_cast<std::size_t>(i)], idm, g, 0, 1,
                                            child_data[{i, 0}], child_data[{i, 1}]);
                add_entry(child_id[{i, 0}], child_id[{i, 1}], std::move(sad));
            }
            for (auto& [j, f] : out_[static_cast<std::size_t>(i)]) {
                for (int eps = 0; eps < 2; ++eps) {
                    Morph<F> ext = extend_entry(objs_[static_cast<std::size_t>(i)],
                                                objs_[static_cast<std::size_t>(j)], f, g, eps, eps,
                                                child_data[{i, eps}], child_data[{j, eps}]);
                    if (with_signs && eps == 1) ext = -ext;
                    add_entry(child_id[{i, eps}], child_id[{j, eps}], std::move(ext));
                }
            }
        }
        for (int i : old_ids) {
            step.children[i] = {child_id[{i, 0}], child_id[{i, 1}]};
            kill(i);
        }
        if (trace_) {
            step.child_data = std::move(child_data);
            steps_.push_back(std::move(step));
        }
    }

    /// Identity-like morph between `from` and `to` where `to` is `from` with
    /// circle 0 removed; the removed circle is capped (circle_on_src) or
    /// cupped, with the given (dotted?, coefficient) terms. Shared circles
    /// become tubes.
    Morph<F> deloop_map(const ScanObj& from, const ScanObj& to, bool circle_on_src,
                        const std::vector<std::pair<int, Poly<F>>>& cap_terms) {
        // overlay(from, to) enumerates arc cycles, then from's circles, then
        // to's circles; masks below follow that order.
        int n_arc_cycles = 0;
        {
            auto cyc = overlay(from, to);
            for (auto& cy : cyc)
                if (cy.a_circle < 0 && cy.b_circle < 0) ++n_arc_cycles;
        }
        int nfrom = static_cast<int>(from.circles.size());
        auto bit_from = [&](int i) { return n_arc_cycles + i; };
        auto bit_to = [&](int j) { return n_arc_cycles + nfrom + j; };
        int cap_bit = circle_on_src ? bit_from(0) : bit_to(0);

        Morph<F> m;
        for (auto& [dot, coeff] : cap_terms)
            m.add(dot ? (1u << cap_bit) : 0u, coeff);
        Poly<F> upv = Poly<F>::U() + Poly<F>::V();
        int shared = static_cast<int>(std::min(from.circles.size(), to.circles.size()));
        for (int k = 0; k < shared; ++k) {
            int f_idx = circle_on_src ? k + 1 : k;
            int t_idx = circle_on_src ? k : k + 1;
            int src_bit = bit_from(f_idx);
            int tgt_bit = bit_to(t_idx);
            bool marked = from.circles[static_cast<std::size_t>(f_idx)].second;
            Morph<F> nm;
            for (auto& [mask, p] : m.terms) {
                if (marked) {
                    nm.add(mask, p);
                } else {
                    nm.add(mask | (1u << src_bit), p);
                    nm.add(mask | (1u << tgt_bit), p);
                    nm.add(mask, -(p * upv));
                }
            }
            m = std::move(nm);
        }
        return m;
    }

    void deloop_all() {
        while (true) {
            int io = -1;
            for (std::size_t i = 0; i < objs_.size(); ++i)
                if (objs_[i].alive && !objs_[i].circles.empty()) {
                    io = static_cast<int>(i);
                    break;
                }
            if (io < 0) return;
            ScanObj O = objs_[static_cast<std::size_t>(io)];
            auto [key, marked] = O.circles[0];

            ScanObj base = O;
            base.circles.erase(base.circles.begin());
            base.alive = true;

            TraceStep<F> step;
            step.kind = TraceStep<F>::Deloop;
            step.obj = io;
            step.circle_key = key;
            step.circle_marked = marked;
            step.pre_obj = O;

            std::vector<long> em = arc_edge_min_[static_cast<std::size_t>(io)];
            if (marked) {
                ScanObj child = base;
                child.qdeg -= 1;
                int ic = new_obj(child, em);
                Morph<F> phi =
                    deloop_map(O, objs_[static_cast<std::size_t>(ic)], true, {{0, Poly<F>::one()}});
                Morph<F> psi =
                    deloop_map(objs_[static_cast<std::size_t>(ic)], O, false, {{0, Poly<F>::one()}});
                rewire(io, {{ic, phi, psi}});
                step.deloop_children = {ic, -1};
            } else {
                ScanObj plus = base, minus = base;
                plus.qdeg += 1;
                minus.qdeg -= 1;
                int ip = new_obj(plus, em);
                int im = new_obj(minus, em);
                Poly<F> upv = Poly<F>::U() + Poly<F>::V();
                Morph<F> phi_p = deloop_map(O, objs_[static_cast<std::size_t>(ip)], true,
                                            {{1, Poly<F>::one()}, {0, -upv}});
                Morph<F> psi_p = deloop_map(objs_[static_cast<std::size_t>(ip)], O, false,
                                            {{0, Poly<F>::one()}});
                Morph<F> phi_m =
                    deloop_map(O, objs_[static_cast<std::size_t>(im)], true, {{0, Poly<F>::one()}});
                Morph<F> psi_m = deloop_map(objs_[static_cast<std::size_t>(im)], O, false,
                                            {{1, Poly<F>::one()}});
                rewire(io, {{ip, phi_p, psi_p}, {im, phi_m, psi_m}});
                step.deloop_children = {ip, im};
            }
            if (trace_) steps_.push_back(std::move(step));
        }
    }

    struct Rewire {
        int child;
        Morph<F> phi; // O -> child
        Morph<F> psi; // child -> O
    };
    void rewire(int io, std::vector<Rewire> maps) {
        auto incoming = in_[static_cast<std::size_t>(io)];
        auto outgoing = out_[static_cast<std::size_t>(io)];
        for (auto& rw : maps) {
            for (auto& [a, f] : incoming)
                add_entry(a, rw.child,
                          compose(objs_[static_cast<std::size_t>(a)],
                                  objs_[static_cast<std::size_t>(io)],
                                  objs_[static_cast<std::size_t>(rw.child)], f, rw.phi));
            for (auto& [b, f] : outgoing)
                add_entry(rw.child, b,
                          compose(objs_[static_cast<std::size_t>(rw.child)],
                                  objs_[static_cast<std::size_t>(io)],
                                  objs_[static_cast<std::size_t>(b)], rw.psi, f));
        }
        kill(io);
    }

    void eliminate_all() {
        while (true) {
            int pi = -1, pj = -1;
            F c = F::zero();
            for (std::size_t i = 0; i < objs_.size() && pi < 0; ++i) {
                if (!objs_[i].alive) continue;
                for (auto& [j, m] : out_[i]) {
                    if (!objs_[static_cast<std::size_t>(j)].alive) continue;
                    if (!objs_[i].same_shape(objs_[static_cast<std::size_t>(j)])) continue;
                    auto u = m.unit_scalar();
                    if (u) {
                        pi = static_cast<int>(i);
                        pj = j;
                        c = *u;
                        break;
                    }
                }
            }
            if (pi < 0) return;

            TraceStep<F> step;
            step.kind = TraceStep<F>::Eliminate;
            step.pivot_src = pi;
            step.pivot_tgt = pj;
            step.pivot_coeff = c;
            step.pivot_hdeg = objs_[static_cast<std::size_t>(pi)].hdeg;

            F cinv = c.inverse();
            std::vector<std::pair<int, Morph<F>>> deltas, gammas;
            for (auto& [a, f] : in_[static_cast<std::size_t>(pj)])
                if (a != pi) deltas.push_back({a, f});
            for (auto& [b, f] : out_[static_cast<std::size_t>(pi)])
                if (b != pj) gammas.push_back({b, f});
            if (trace_) {
                step.delta = deltas;
                step.gamma = gammas;
                step.obj_snapshot[pi] = objs_[static_cast<std::size_t>(pi)];
                step.obj_snapshot[pj] = objs_[static_cast<std::size_t>(pj)];
                for (auto& [a, f] : deltas)
                    step.obj_snapshot[a] = objs_[static_cast<std::size_t>(a)];
                for (auto& [b, f] : gammas)
                    step.obj_snapshot[b] = objs_[static_cast<std::size_t>(b)];
            }
            for (auto& [a, da] : deltas)
                for (auto& [b, gb] : gammas) {
                    Morph<F> prod = compose(objs_[static_cast<std::size_t>(a)],
                                            objs_[static_cast<std::size_t>(pj)],
                                            objs_[static_cast<std::size_t>(b)], da, gb);
                    add_entry(a, b, -prod.scaled(cinv));
                }
            kill(pi);
            kill(pj);
            if (trace_) steps_.push_back(std::move(step));
        }
    }
};

} // namespace bn

template <CoefficientField F>
GradedChainComplex<F> scan_reduce_complex(const LinkDiagram& D, std::optional<long> basepoint) {
    bn::Scanner<F> s(D, basepoint);
    return s.extract();
}

} // namespace equikh
