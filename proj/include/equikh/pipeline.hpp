#pragma once

#include <atomic>
#include <cstdlib>
#include <optional>
#include <thread>

#include "equikh/invariant.hpp"

namespace equikh {

enum class PipelineMode { Scan, Cube };

inline int thread_budget() {
    if (const char* env = std::getenv("EQUIKH_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Gr_t of the lifted canonical generator, together with the largest U/V
/// exponent among its summands. The minimal summand is the pure-X tensor, so
/// the value is constant in t: weight(oriented) + n+ - 2n- - (#unmarked
/// circles), with the reduced shift cancelling the marked factor's grading.
struct LiftFloor {
    RatQ value;
    long exponent_bound;
};

inline LiftFloor lift_floor(const LinkDiagram& D, bool reduced) {
    auto res = D.oriented_resolution(0);
    int r = static_cast<int>(res.circles.size());
    int rp = reduced ? r - 1 : r;
    auto tags = D.checkerboard_labels(0, reduced ? D.basepoint() : std::nullopt);
    long a = 0, b = 0;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (reduced && D.basepoint() &&
            static_cast<int>(i) == res.circle_of_edge.at(*D.basepoint()))
            continue;
        (tags[i] == CircleTag::A ? a : b)++;
    }
    int w = res.weight;
    RatQ value(w + D.n_plus() - 2 * D.n_minus() - rp);
    return {value, std::max(a, b)};
}

/// One diagram prepared for profile evaluation: the complex (cube- or
/// scan-reduced), the homological degrees to search, and the certified
/// search floor. Evaluations at distinct t are independent and const.
template <CoefficientField F>
class ProfileEngine {
  public:
    LinkDiagram diagram;
    GradedChainComplex<F> C;
    bool reduced = false;
    std::vector<int> degrees;
    LiftFloor floor;
    long long qden = 8;
    long endpoint_cap = 4;

    /// s_t for interior grid points; s_t = gr_t - 1 unreduced, s~_t = gr_t
    /// reduced. Values at t = p/q lie in (1/q)Z, so the level sweep steps
    /// by the reduced denominator of t.
    RatQ value_at(const RatQ& t) const {
        RatQ g = grt_search(C, t, degrees, t.denominator(), floor.value);
        return reduced ? g : g - 1;
    }
    GrtValue value_at_endpoint(int t02) const {
        GrtValue g =
            grt_endpoint(C, t02, degrees, qden, floor.value, endpoint_cap, floor.exponent_bound);
        if (!reduced) g.value = g.value - 1;
        return g;
    }

    PLProfile sweep(int threads = 0) const {
        if (threads <= 0) threads = thread_budget();
        PLProfile prof;
        prof.qden = qden;
        prof.values.assign(static_cast<std::size_t>(2 * qden + 1), RatQ(0));
        std::atomic<long long> next{0};
        auto worker = [&] {
            while (true) {
                long long k = next.fetch_add(1);
                if (k > 2 * qden) return;
                if (k == 0 || k == 2 * qden) {
                    auto v = value_at_endpoint(k == 0 ? 0 : 2);
                    prof.values[static_cast<std::size_t>(k)] = v.value;
                    (k == 0 ? prof.stable_at_0 : prof.stable_at_2) = v.stable;
                } else {
                    prof.values[static_cast<std::size_t>(k)] = value_at(RatQ(k, qden));
                }
            }
        };
        std::vector<std::thread> pool;
        int nthreads = std::min<long long>(threads, 2 * qden + 1);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        prof.recompute_flags();
        return prof;
    }
};

template <CoefficientField F>
GradedChainComplex<F> scan_reduce_complex(const LinkDiagram& D, std::optional<long> basepoint);

/// Build the evaluation engine for a diagram. Scan mode reduces by
/// delooping and unit-pivot elimination; cube mode materializes the full
/// cube (capped).
template <CoefficientField F>
ProfileEngine<F> make_engine(const LinkDiagram& D, PipelineMode mode, bool reduced,
                             long long qden = 8, long endpoint_cap = 4, int crossing_cap = 12) {
    if (reduced && !D.basepoint())
        throw std::invalid_argument("reduced invariants need a basepoint");
    ProfileEngine<F> e;
    e.diagram = D;
    e.reduced = reduced;
    e.qden = qden;
    e.endpoint_cap = endpoint_cap;
    std::optional<long> bp = reduced ? D.basepoint() : std::nullopt;
    if (mode == PipelineMode::Cube) {
        e.C = build_cube<F>(D, bp, crossing_cap).C;
    } else {
        e.C = scan_reduce_complex<F>(D, bp);
    }
    e.floor = lift_floor(D, reduced);
    if (D.components() == 1) {
        e.degrees = {e.C.offset_of(0)};
    } else {
        e.degrees = support_degrees(e.C);
    }
    return e;
}

/// The Rasmussen invariant over F, from the U = 0 specialization (graded
/// Bar-Natan theory over the PID F[V]): s_F + 1 is the maximal gr_0 among
/// nontorsion classes with no U-power, which is exact rather than capped.
template <CoefficientField F>
GradedChainComplex<F> specialize_u_zero(const GradedChainComplex<F>& C) {
    GradedChainComplex<F> S = C;
    for (auto& layer : S.diff)
        for (auto& col : layer) {
            for (auto& [tgt, p] : col) p = p.set_u_zero();
            std::erase_if(col, [](const auto& e) { return e.second.is_zero(); });
        }
    return S;
}

template <CoefficientField F>
long long rasmussen_s(const LinkDiagram& D, PipelineMode mode, int crossing_cap = 12) {
    if (D.components() != 1)
        throw std::invalid_argument("rasmussen_s: knots only");
    GradedChainComplex<F> C;
    if (mode == PipelineMode::Cube)
        C = build_cube<F>(D, std::nullopt, crossing_cap).C;
    else
        C = scan_reduce_complex<F>(D, std::nullopt);
    GradedChainComplex<F> S = specialize_u_zero(C);
    LiftFloor fl = lift_floor(D, false);
    RatQ g = grt_search(S, RatQ(0), {S.offset_of(0)}, 1, fl.value, /*ucap=*/0, /*vcap=*/-1);
    RatQ s = g - 1;
    if (s.denominator() != 1) throw std::logic_error("rasmussen_s: non-integer result");
    return s.numerator();
}

} // namespace equikh
