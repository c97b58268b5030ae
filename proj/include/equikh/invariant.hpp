#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "equikh/complex.hpp"
#include "equikh/lee.hpp"

namespace equikh {

/// Exact rational parameter t in [0,2] and filtration levels.
using RatQ = boost::rational<long long>;

inline RatQ parse_ratq(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return RatQ(std::stoll(s), 1);
        return RatQ(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: " + s);
    }
}
inline std::string ratq_str(const RatQ& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// gr_t of a lattice point (m, n, gr_q): q - t*m - (2-t)*n.
inline RatQ grt_of_point(std::uint32_t m, std::uint32_t n, int q, const RatQ& t) {
    return RatQ(q) - t * static_cast<long long>(m) -
           (RatQ(2) - t) * static_cast<long long>(n);
}

/// Minimal gr_t over the homogeneous summands of a chain (the filtration
/// grading); empty chains have no value.
template <CoefficientField F>
std::optional<RatQ> grt_of_chain(const GradedChainComplex<F>& C, int k, const SparseChain<F>& z,
                                 const RatQ& t) {
    std::optional<RatQ> best;
    for (auto& [g, p] : z) {
        int q = C.grq[static_cast<std::size_t>(k)][static_cast<std::size_t>(g)];
        for (auto& [mono, c] : p.terms()) {
            RatQ v = grt_of_point(mono.u, mono.v, q, t);
            if (!best || v < *best) best = v;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Truncations F_lambda^t at a fixed homological degree: the F-span of the
// lattice generators U^m V^n g with gr_t >= lambda. Finite for t in (0,2);
// at the endpoints the unbounded exponent is cut off at a configurable cap.

template <CoefficientField F>
struct Truncation {
    struct Item {
        int gen;
        std::uint32_t m, n;
        bool operator==(const Item&) const = default;
    };
    int k = 0;
    RatQ lambda;
    std::vector<Item> items;
    std::map<std::tuple<int, std::uint32_t, std::uint32_t>, int> index;

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
};

/// Enumerate the truncation basis at degree offset k. ucap / vcap bound the
/// U- and V-exponents; pass negative for "no cap" (only valid when the
/// respective coefficient of t is nonzero, i.e. away from the endpoints).
template <CoefficientField F>
Truncation<F> truncate(const GradedChainComplex<F>& C, int k, const RatQ& t, const RatQ& lambda,
                       long ucap = -1, long vcap = -1) {
    if (t < RatQ(0) || t > RatQ(2)) throw std::invalid_argument("truncate: t outside [0,2]");
    if (t == RatQ(0) && ucap < 0) throw std::invalid_argument("truncate: t=0 requires a U-cap");
    if (t == RatQ(2) && vcap < 0) throw std::invalid_argument("truncate: t=2 requires a V-cap");
    Truncation<F> tr;
    tr.k = k;
    tr.lambda = lambda;
    RatQ two_minus_t = RatQ(2) - t;
    for (int g = 0; g < C.rank_at(k); ++g) {
        int q = C.grq[static_cast<std::size_t>(k)][static_cast<std::size_t>(g)];
        RatQ slack0 = RatQ(q) - lambda;
        if (slack0 < RatQ(0)) continue;
        long mmax = t > RatQ(0) ? boost::rational_cast<long long>(slack0 / t) : ucap;
        if (ucap >= 0) mmax = std::min(mmax, ucap);
        for (long m = 0; m <= mmax; ++m) {
            RatQ slack = slack0 - t * m;
            if (slack < RatQ(0)) break;
            long nmax =
                two_minus_t > RatQ(0) ? boost::rational_cast<long long>(slack / two_minus_t) : vcap;
            if (vcap >= 0) nmax = std::min(nmax, vcap);
            for (long n = 0; n <= nmax; ++n) {
                tr.index[{g, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n)}] =
                    static_cast<int>(tr.items.size());
                tr.items.push_back({g, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n)});
            }
        }
    }
    return tr;
}

namespace detail {

/// Kernel of a sparse column matrix over F (columns: row -> coefficient).
/// Returns kernel vectors as column-index -> coefficient maps.
template <CoefficientField F>
std::vector<std::map<int, F>> kernel_basis(const std::vector<std::map<int, F>>& cols) {
    struct Pivot {
        std::map<int, F> col;  // reduced column
        std::map<int, F> comb; // expression in original columns
        int row;
    };
    std::vector<Pivot> pivots;
    std::vector<std::map<int, F>> kernel;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::map<int, F> col = cols[j];
        std::map<int, F> comb{{static_cast<int>(j), F::one()}};
        for (auto& p : pivots) {
            auto it = col.find(p.row);
            if (it == col.end()) continue;
            F factor = it->second * p.col.at(p.row).inverse();
            for (auto& [r, c] : p.col) {
                auto& slot = col[r];
                slot = slot - factor * c;
                if (slot.is_zero()) col.erase(r);
            }
            for (auto& [r, c] : p.comb) {
                auto& slot = comb[r];
                slot = slot - factor * c;
                if (slot.is_zero()) comb.erase(r);
            }
        }
        if (col.empty()) {
            kernel.push_back(std::move(comb));
        } else {
            int row = col.begin()->first;
            pivots.push_back({std::move(col), std::move(comb), row});
        }
    }
    return kernel;
}

} // namespace detail

/// Restricted differential on a truncation, as sparse field columns into the
/// degree-(k+1) truncation at the same level (targets beyond the source caps
/// are kept: the map is computed in full, so kernel vectors are honest
/// cycles of the complex).
template <CoefficientField F>
std::pair<std::vector<std::map<int, F>>, Truncation<F>>
truncated_differential(const GradedChainComplex<F>& C, const Truncation<F>& tr, const RatQ& t,
                       long ucap = -1, long vcap = -1) {
    long du = 0, dv = 0; // max differential exponents, to widen target caps
    if (ucap >= 0 || vcap >= 0) {
        for (int k2 = 0; k2 + 1 < C.degree_count(); ++k2)
            for (auto& col : C.diff[static_cast<std::size_t>(k2)])
                for (auto& [tgt, p] : col) {
                    du = std::max(du, static_cast<long>(p.max_u_degree()));
                    dv = std::max(dv, static_cast<long>(p.max_v_degree()));
                }
    }
    Truncation<F> tgt_tr;
    if (tr.k + 1 < C.degree_count())
        tgt_tr = truncate(C, tr.k + 1, t, tr.lambda, ucap < 0 ? -1 : ucap + du,
                          vcap < 0 ? -1 : vcap + dv);
    else
        tgt_tr.k = tr.k + 1;

    std::vector<std::map<int, F>> cols(tr.items.size());
    if (tr.k + 1 >= C.degree_count()) return {cols, tgt_tr};
    for (std::size_t j = 0; j < tr.items.size(); ++j) {
        const auto& it = tr.items[j];
        for (auto& [tg, p] :
             C.diff[static_cast<std::size_t>(tr.k)][static_cast<std::size_t>(it.gen)]) {
            for (auto& [mono, c] : p.terms()) {
                auto key = std::make_tuple(tg, it.m + mono.u, it.n + mono.v);
                auto found = tgt_tr.index.find(key);
                if (found == tgt_tr.index.end())
                    throw std::logic_error("truncation: differential escapes the target basis");
                auto& slot = cols[j][found->second];
                slot = slot + c;
                if (slot.is_zero()) cols[j].erase(found->second);
            }
        }
    }
    return {cols, tgt_tr};
}

/// Is there a nontorsion cycle inside F_lambda^t at degree offset k? Torsion
/// cycles form an F-subspace (the intersection with a fraction-field span),
/// so it suffices to test a kernel basis of the truncated differential.
template <CoefficientField F>
bool nontorsion_cycle_in_truncation(const GradedChainComplex<F>& C, const Truncation<F>& tr,
                                    const RatQ& t, long ucap, long vcap,
                                    const PolyMatrix<F>* boundary, std::size_t boundary_rank) {
    if (tr.empty()) return false;
    auto [cols, tgt_tr] = truncated_differential(C, tr, t, ucap, vcap);
    auto kernel = detail::kernel_basis(cols);
    for (auto& kv : kernel) {
        std::vector<Poly<F>> z(static_cast<std::size_t>(C.rank_at(tr.k)));
        for (auto& [j, c] : kv) {
            const auto& it = tr.items[static_cast<std::size_t>(j)];
            z[static_cast<std::size_t>(it.gen)].add_term(Monomial{it.m, it.n}, c);
        }
        bool nontorsion;
        if (boundary == nullptr) {
            nontorsion = true; // bottom degree: no boundaries
        } else {
            nontorsion = boundary->with_column(z).ffge_rank() != boundary_rank;
        }
        if (nontorsion) return true;
    }
    return false;
}

/// Result of a filtration-level search.
struct GrtValue {
    RatQ value;
    bool stable = true; // endpoint stabilization (always true for t in (0,2))
};

/// gr_t of a complex: the largest lambda in (1/q)Z such that some cycle in
/// F_lambda^t at a searched degree is nontorsion. Descends from the maximal
/// generator grading; `floor` is the gr_t of a known nontorsion cycle and
/// certifies termination.
template <CoefficientField F>
RatQ grt_search(const GradedChainComplex<F>& C, const RatQ& t, const std::vector<int>& degrees,
                long long qden, std::optional<RatQ> floor, long ucap = -1, long vcap = -1,
                bool floor_is_hard = true) {
    if (degrees.empty()) throw std::invalid_argument("grt_search: no degrees to search");
    std::optional<long long> lam_max;
    for (int k : degrees)
        for (int q : C.grq[static_cast<std::size_t>(k)])
            if (!lam_max || q > *lam_max) lam_max = q;
    if (!lam_max) throw std::invalid_argument("grt_search: empty complex");

    // Cached incoming-boundary data per degree.
    std::map<int, std::pair<PolyMatrix<F>, std::size_t>> boundaries;
    for (int k : degrees) {
        if (k == 0) continue;
        PolyMatrix<F> m = C.diff_matrix(k - 1);
        std::size_t r = m.ffge_rank();
        boundaries.emplace(k, std::make_pair(std::move(m), r));
    }

    const RatQ step(1, qden);
    RatQ lam(*lam_max);
    const long long max_steps = 4 * qden * (std::abs(*lam_max) + 64);
    for (long long iter = 0; iter <= max_steps; ++iter, lam -= step) {
        for (int k : degrees) {
            auto tr = truncate(C, k, t, lam, ucap, vcap);
            if (tr.empty()) continue;
            const PolyMatrix<F>* b = nullptr;
            std::size_t br = 0;
            auto found = boundaries.find(k);
            if (found != boundaries.end()) {
                b = &found->second.first;
                br = found->second.second;
            }
            if (nontorsion_cycle_in_truncation(C, tr, t, ucap, vcap, b, br)) return lam;
        }
        if (floor && lam < *floor) {
            if (floor_is_hard)
                throw std::logic_error("grt_search: descended past a certified floor");
            // capped endpoint run that cannot see the certifying cycle:
            // report the floor as a lower bound
            return *floor;
        }
    }
    throw std::runtime_error("grt_search: no nontorsion class found in the searched range");
}

/// Endpoint evaluation at t in {0, 2}: run with the exponent cap, rerun at
/// cap+2, flag stable when both agree.
template <CoefficientField F>
GrtValue grt_endpoint(const GradedChainComplex<F>& C, int t02, const std::vector<int>& degrees,
                      long long qden, std::optional<RatQ> floor, long cap,
                      long floor_exponent_bound) {
    RatQ t(t02);
    auto run = [&](long c) {
        bool sees_floor = floor && c >= floor_exponent_bound;
        return grt_search(C, t, degrees, qden, floor, t02 == 0 ? c : -1, t02 == 2 ? c : -1,
                          sees_floor);
    };
    RatQ v1 = run(cap);
    RatQ v2 = run(cap + 2);
    return {v2, v1 == v2};
}

// ---------------------------------------------------------------------------
// Profiles.

/// Sampled values of the invariant on the grid t = k/q, k = 0..2q, with the
/// symmetry/rationality metadata.
struct PLProfile {
    long long qden = 8;
    std::vector<RatQ> values; // index k: t = k/qden
    bool symmetric = true;
    bool rational_values = true;
    bool stable_at_0 = true;
    bool stable_at_2 = true;

    RatQ at_grid(long long k) const { return values[static_cast<std::size_t>(k)]; }
    void recompute_flags() {
        symmetric = true;
        rational_values = true;
        long long n = static_cast<long long>(values.size()) - 1;
        for (long long k = 0; k <= n; ++k) {
            if (values[static_cast<std::size_t>(k)] != values[static_cast<std::size_t>(n - k)])
                symmetric = false;
            if (qden % values[static_cast<std::size_t>(k)].denominator() != 0)
                rational_values = false;
        }
    }
};

} // namespace equikh
