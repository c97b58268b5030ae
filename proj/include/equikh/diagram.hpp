#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace equikh {

/// Thrown on malformed or non-planar input; the CLI maps it to exit code 2.
struct DiagramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PD conventions used throughout (any consistent choice is acceptable; this
// one is fixed so the standard right-handed trefoil code has writhe +3):
//   X[a,b,c,d]: slots listed cyclically, incoming under-strand in slot 1,
//   under-strand exits at slot 3, over-strand occupies slots 2 and 4.
//   A crossing is positive exactly when the over-strand enters at slot 2.
//   The 0-smoothing joins slots {1,4} and {2,3}; the 1-smoothing joins
//   {1,2} and {3,4}. With these choices the 0-smoothing of a positive
//   crossing is its oriented smoothing.
// Slots are 0-indexed in code (slot k of the text form is index k-1).

struct Crossing {
    std::array<long, 4> e{}; // edge label per slot
};

/// One full smoothing of the diagram.
struct Resolution {
    std::vector<std::uint8_t> word;         // 0/1 per crossing
    std::vector<std::vector<long>> circles; // sorted edge labels; ordered by min edge
    std::map<long, int> circle_of_edge;
    int weight = 0; // number of 1-smoothings
};

enum class CircleTag : std::uint8_t { A, B }; // checkerboard labels (e1/e2 side)

/// Combinatorial oriented link diagram: a PD-coded 4-valent piece plus
/// optional crossingless circles. Immutable after construction.
class LinkDiagram {
  public:
    LinkDiagram() { finalize(); }

    static LinkDiagram parse_pd(const std::string& text) {
        LinkDiagram d;
        d.crossings_ = parse_pd_text(text);
        d.finalize();
        return d;
    }

    /// k crossingless circles; ccw flags default to true.
    static LinkDiagram unknots(int k, std::vector<bool> ccw = {}) {
        LinkDiagram d;
        d.bare_ccw_ = std::move(ccw);
        d.bare_ccw_.resize(static_cast<std::size_t>(k), true);
        d.finalize();
        return d;
    }

    static LinkDiagram from_json(const nlohmann::json& j) {
        LinkDiagram d;
        if (j.contains("crossings")) {
            for (auto& jc : j.at("crossings")) {
                Crossing c;
                auto& je = jc.at("edges");
                if (!je.is_array() || je.size() != 4)
                    throw DiagramError("json: crossing needs 4 edges");
                for (int s = 0; s < 4; ++s) c.e[static_cast<std::size_t>(s)] = je[static_cast<std::size_t>(s)].get<long>();
                d.crossings_.push_back(c);
            }
        }
        int k = j.value("unknots", 0);
        if (k < 0) throw DiagramError("json: negative unknot count");
        d.bare_ccw_.assign(static_cast<std::size_t>(k), true);
        d.finalize();
        if (j.contains("crossings")) {
            std::size_t i = 0;
            for (auto& jc : j.at("crossings")) {
                if (jc.contains("sign") && jc.at("sign").get<int>() != d.sign_[i])
                    throw DiagramError("json: stated crossing sign disagrees with orientation");
                ++i;
            }
        }
        if (j.contains("basepoint") && !j.at("basepoint").is_null())
            d.set_basepoint(j.at("basepoint").get<long>());
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["crossings"] = nlohmann::json::array();
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            nlohmann::json jc;
            jc["edges"] = {crossings_[c].e[0], crossings_[c].e[1], crossings_[c].e[2],
                           crossings_[c].e[3]};
            jc["sign"] = sign_[c];
            j["crossings"].push_back(jc);
        }
        j["unknots"] = static_cast<int>(bare_ccw_.size());
        if (basepoint_) j["basepoint"] = *basepoint_;
        return j;
    }

    std::string pd_string() const {
        std::string s = "PD[";
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            if (c) s += ",";
            s += "X[" + std::to_string(crossings_[c].e[0]) + "," + std::to_string(crossings_[c].e[1]) +
                 "," + std::to_string(crossings_[c].e[2]) + "," + std::to_string(crossings_[c].e[3]) + "]";
        }
        s += "]";
        return s;
    }

    int n() const { return static_cast<int>(crossings_.size()); }
    int n_plus() const { return n_plus_; }
    int n_minus() const { return n_minus_; }
    int writhe() const { return n_plus_ - n_minus_; }
    int components() const { return n_pd_components_ + static_cast<int>(bare_ccw_.size()); }
    int bare_circles() const { return static_cast<int>(bare_ccw_.size()); }
    const std::vector<Crossing>& crossings() const { return crossings_; }
    int sign(int c) const { return sign_[static_cast<std::size_t>(c)]; }
    const std::vector<long>& edge_labels() const { return edge_labels_; }
    long bare_label(int i) const { return bare_label_base_ + i; }
    bool bare_is_ccw(int i) const { return bare_ccw_[static_cast<std::size_t>(i)]; }
    bool is_bare_label(long e) const {
        return e >= bare_label_base_ && e < bare_label_base_ + bare_circles();
    }

    std::optional<long> basepoint() const { return basepoint_; }
    void set_basepoint(long edge) {
        if (!is_bare_label(edge) && !edge_ends_.count(edge))
            throw DiagramError("basepoint: no such edge: " + std::to_string(edge));
        basepoint_ = edge;
    }
    void clear_basepoint() { basepoint_ = std::nullopt; }

    int component_of_edge(long e) const {
        if (is_bare_label(e)) return n_pd_components_ + static_cast<int>(e - bare_label_base_);
        auto it = component_of_edge_.find(e);
        if (it == component_of_edge_.end()) throw DiagramError("unknown edge label");
        return it->second;
    }
    /// Components of the two strands through crossing c: {under, over}.
    std::pair<int, int> strand_components(int c) const {
        const auto& x = crossings_[static_cast<std::size_t>(c)];
        return {component_of_edge(x.e[0]), component_of_edge(x.e[1])};
    }

    /// Other endpoint of edge e, seen from crossing c / slot s.
    std::pair<int, int> mate_of(int c, int s) const {
        long e = crossings_[static_cast<std::size_t>(c)].e[static_cast<std::size_t>(s)];
        const auto& occ = edge_ends_.at(e);
        if (occ[0] == std::make_pair(c, s)) return occ[1];
        return occ[0];
    }
    /// True if the edge at (c,s) is directed into the crossing.
    bool arrives_at(int c, int s) const { return head_att_.at(att_id(c, s)); }

    LinkDiagram mirror() const {
        LinkDiagram d;
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            const auto& x = crossings_[c];
            Crossing m;
            if (sign_[c] > 0)
                m.e = {x.e[1], x.e[2], x.e[3], x.e[0]};
            else
                m.e = {x.e[3], x.e[0], x.e[1], x.e[2]};
            d.crossings_.push_back(m);
        }
        d.bare_ccw_ = bare_ccw_;
        d.finalize();
        if (basepoint_) d.set_basepoint(*basepoint_);
        return d;
    }

    /// Smooth every crossing according to word (bit c = smoothing at c).
    Resolution resolve(const std::vector<std::uint8_t>& word) const {
        if (word.size() != crossings_.size()) throw DiagramError("resolve: wrong word length");
        Resolution res;
        res.word = word;
        for (auto b : word) res.weight += b;

        // Circles: alternate edge traversal with smoothing-arc hops.
        std::vector<bool> seen(att_count(), false);
        std::vector<std::vector<long>> circles;
        for (int start = 0; start < att_count(); ++start) {
            if (seen[static_cast<std::size_t>(start)]) continue;
            std::vector<long> edges;
            int a = start;
            do {
                seen[static_cast<std::size_t>(a)] = true;
                int paired = smooth_partner(a, word);
                seen[static_cast<std::size_t>(paired)] = true;
                auto [c, s] = att_pos(paired);
                edges.push_back(crossings_[static_cast<std::size_t>(c)].e[static_cast<std::size_t>(s)]);
                auto [mc, ms] = mate_of(c, s);
                a = att_id(mc, ms);
            } while (a != start);
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            circles.push_back(std::move(edges));
        }
        for (int i = 0; i < bare_circles(); ++i) circles.push_back({bare_label(i)});
        std::sort(circles.begin(), circles.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        for (std::size_t i = 0; i < circles.size(); ++i)
            for (long e : circles[i]) res.circle_of_edge[e] = static_cast<int>(i);
        res.circles = std::move(circles);
        return res;
    }

    /// Smoothing word of the orientation obtained by reversing the
    /// components in reversal_mask (bit per component id).
    std::vector<std::uint8_t> oriented_word(std::uint32_t reversal_mask = 0) const {
        std::vector<std::uint8_t> w(crossings_.size());
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            std::uint8_t base = sign_[c] > 0 ? 0 : 1;
            auto [cu, co] = strand_components(static_cast<int>(c));
            bool ru = (reversal_mask >> cu) & 1, ro = (reversal_mask >> co) & 1;
            w[c] = (ru != ro) ? static_cast<std::uint8_t>(1 - base) : base;
        }
        return w;
    }

    Resolution oriented_resolution(std::uint32_t reversal_mask = 0) const {
        return resolve(oriented_word(reversal_mask));
    }

    int seifert_circle_count(std::uint32_t reversal_mask = 0) const {
        return static_cast<int>(oriented_resolution(reversal_mask).circles.size());
    }

    /// Checkerboard labels of the oriented-resolution circles: a circle is
    /// tagged A when the region to its left is shaded. Without a basepoint
    /// the unbounded region is unshaded; with one, shading is normalized so
    /// the region left of the basepoint is shaded (and the marked circle
    /// comes out tagged A).
    std::vector<CircleTag> checkerboard_labels(std::uint32_t reversal_mask = 0,
                                               std::optional<long> basepoint = {}) const {
        Resolution res = oriented_resolution(reversal_mask);
        if (basepoint && !is_bare_label(*basepoint) && !edge_ends_.count(*basepoint))
            throw DiagramError("checkerboard: basepoint not on the diagram");

        // Regions of the smoothed diagram: faces of the 4-valent graph merged
        // across each smoothing (opposite corners always carry equal shade,
        // so the checkerboard descends).
        std::vector<int> parent(static_cast<std::size_t>(face_count_));
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        auto unite = [&](int a, int b) {
            a = find(a);
            b = find(b);
            if (a != b) {
                if (face_shaded_[static_cast<std::size_t>(a)] != face_shaded_[static_cast<std::size_t>(b)])
                    throw DiagramError("internal: smoothing merged opposite shades");
                parent[static_cast<std::size_t>(a)] = b;
            }
        };
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            int ci = static_cast<int>(c);
            if (res.word[c] == 0)
                unite(face_of_att_[static_cast<std::size_t>(att_id(ci, 2))],
                      face_of_att_[static_cast<std::size_t>(att_id(ci, 0))]);
            else
                unite(face_of_att_[static_cast<std::size_t>(att_id(ci, 3))],
                      face_of_att_[static_cast<std::size_t>(att_id(ci, 1))]);
        }

        // Shade of the region left of each circle, read at its minimal edge.
        bool flip = false;
        auto left_shade_of_edge = [&](long e, bool reversed) {
            if (is_bare_label(e)) {
                bool ccw = bare_is_ccw(static_cast<int>(e - bare_label_base_)) != reversed;
                bool outer = face_count_ > 0 &&
                             face_shaded_[static_cast<std::size_t>(find(outer_face_))];
                return ccw ? !outer : outer;
            }
            const auto& occ = edge_ends_.at(e);
            bool first_is_head = head_att_[static_cast<std::size_t>(att_id(occ[0].first, occ[0].second))];
            // The face left of the edge is read at the end the strand arrives at.
            auto arr = (first_is_head != reversed) ? occ[0] : occ[1];
            int f = find(face_of_att_[static_cast<std::size_t>(att_id(arr.first, arr.second))]);
            return static_cast<bool>(face_shaded_[static_cast<std::size_t>(f)]);
        };
        auto edge_reversed = [&](long e) {
            return ((reversal_mask >> component_of_edge(e)) & 1) != 0;
        };

        if (basepoint) {
            bool left_shaded = left_shade_of_edge(*basepoint, edge_reversed(*basepoint));
            flip = !left_shaded;
        }
        std::vector<CircleTag> tags;
        tags.reserve(res.circles.size());
        for (const auto& circ : res.circles) {
            long e = circ.front();
            bool shaded = left_shade_of_edge(e, edge_reversed(e)) != flip;
            tags.push_back(shaded ? CircleTag::A : CircleTag::B);
        }
        return tags;
    }

    /// Consistency check used by tests: every edge of a circle sees the same
    /// left region.
    bool left_region_consistent(const Resolution& res, std::uint32_t reversal_mask = 0) const {
        std::vector<int> parent(static_cast<std::size_t>(face_count_));
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x)
                x = parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            return x;
        };
        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            int ci = static_cast<int>(c);
            int a = res.word[c] == 0 ? face_of_att_[static_cast<std::size_t>(att_id(ci, 2))]
                                     : face_of_att_[static_cast<std::size_t>(att_id(ci, 3))];
            int b = res.word[c] == 0 ? face_of_att_[static_cast<std::size_t>(att_id(ci, 0))]
                                     : face_of_att_[static_cast<std::size_t>(att_id(ci, 1))];
            a = find(a);
            b = find(b);
            if (a != b) parent[static_cast<std::size_t>(a)] = b;
        }
        for (const auto& circ : res.circles) {
            int seen = -1;
            for (long e : circ) {
                if (is_bare_label(e)) continue;
                bool rev = ((reversal_mask >> component_of_edge(e)) & 1) != 0;
                const auto& occ = edge_ends_.at(e);
                bool first_is_head =
                    head_att_[static_cast<std::size_t>(att_id(occ[0].first, occ[0].second))];
                auto arr = (first_is_head != rev) ? occ[0] : occ[1];
                int f = find(face_of_att_[static_cast<std::size_t>(att_id(arr.first, arr.second))]);
                if (seen == -1) seen = f;
                if (seen != f) return false;
            }
        }
        return true;
    }

    int face_count() const { return face_count_; }
    int att_count() const { return 4 * n(); }

  private:
    static std::vector<Crossing> parse_pd_text(const std::string& text) {
        std::vector<Crossing> out;
        std::size_t i = 0;
        auto skip = [&] {
            while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
                ++i;
        };
        skip();
        bool wrapped = false, closed = false;
        if (text.compare(i, 3, "PD[") == 0) {
            wrapped = true;
            i += 3;
        }
        while (true) {
            skip();
            if (i >= text.size()) break;
            if (wrapped && text[i] == ']') {
                ++i;
                skip();
                if (i != text.size()) throw DiagramError("pd: trailing characters");
                closed = true;
                break;
            }
            if (text[i] != 'X') throw DiagramError("pd: expected X[...]");
            ++i;
            skip();
            if (i >= text.size() || text[i] != '[') throw DiagramError("pd: expected [");
            ++i;
            Crossing c;
            for (int s = 0; s < 4; ++s) {
                skip();
                bool neg = false;
                if (i < text.size() && text[i] == '-') {
                    neg = true;
                    ++i;
                }
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    throw DiagramError("pd: malformed crossing entry");
                long v = 0;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                    v = v * 10 + (text[i++] - '0');
                c.e[static_cast<std::size_t>(s)] = neg ? -v : v;
            }
            skip();
            if (i >= text.size() || text[i] != ']') throw DiagramError("pd: expected ] after 4 entries");
            ++i;
            out.push_back(c);
        }
        if (wrapped && !closed) throw DiagramError("pd: missing closing ]");
        if (out.empty()) throw DiagramError("pd: no crossings (use an explicit unknot for 0 crossings)");
        return out;
    }

    int att_id(int c, int s) const { return 4 * c + s; }
    std::pair<int, int> att_pos(int a) const { return {a / 4, a % 4}; }

    int smooth_partner(int a, const std::vector<std::uint8_t>& word) const {
        auto [c, s] = att_pos(a);
        static constexpr int pair0[4] = {3, 2, 1, 0}; // {1,4},{2,3} in paper slots
        static constexpr int pair1[4] = {1, 0, 3, 2}; // {1,2},{3,4}
        int t = word[static_cast<std::size_t>(c)] == 0 ? pair0[s] : pair1[s];
        return att_id(c, t);
    }

    void finalize() {
        n_plus_ = n_minus_ = 0;
        edge_ends_.clear();
        head_att_.clear();
        component_of_edge_.clear();
        sign_.assign(crossings_.size(), 0);

        collect_and_glue_edges();

        long maxlabel = 0;
        for (auto& [e, occ] : edge_ends_) maxlabel = std::max(maxlabel, e);
        bare_label_base_ = maxlabel + 1;

        orient_and_sign();
        trace_faces();
        edge_labels_.clear();
        for (auto& [e, occ] : edge_ends_) edge_labels_.push_back(e);
    }

    // Collect edge occurrences. A label appearing once marks an arc cut at a
    // point of the traversal away from any crossing; such an arc continues
    // into the cyclically next once-label. The joins alternate around the
    // sorted once-label cycle (each label has one free end), and known
    // head/tail roles at slots 1 and 3 pin down which alternating class is
    // realized. Chains are then contracted so that afterwards every label
    // has exactly two crossing attachments.
    void collect_and_glue_edges() {
        if (crossings_.empty()) return;
        std::map<long, std::vector<std::pair<int, int>>> occ;
        for (std::size_t c = 0; c < crossings_.size(); ++c)
            for (int s = 0; s < 4; ++s) {
                long e = crossings_[c].e[static_cast<std::size_t>(s)];
                if (e <= 0) throw DiagramError("pd: edge labels must be positive");
                occ[e].push_back({static_cast<int>(c), s});
            }
        std::vector<long> once;
        for (auto& [e, v] : occ) {
            if (v.size() > 2)
                throw DiagramError("pd: edge " + std::to_string(e) + " appears more than twice");
            if (v.size() == 1) once.push_back(e);
        }
        if (!once.empty()) {
            std::size_t k = once.size();
            if (k % 2 != 0) throw DiagramError("pd: odd number of once-used edge labels");
            // Slot 1 attaches a head (its free end is a tail); slot 3 attaches
            // a tail. take[i] joins head(once[i]) with tail(once[i+1]); the
            // takes alternate, so only the parity is to be determined.
            auto consistent = [&](int parity) {
                for (std::size_t i = 0; i < k; ++i) {
                    int slot = occ[once[i]][0].second;
                    bool head_free = (static_cast<int>(i % 2) == parity); // take[i] uses once[i] as head
                    if (slot == 0 && head_free) return false;  // free end must be tail
                    if (slot == 2 && !head_free) return false; // free end must be head
                }
                return true;
            };
            bool okA = consistent(0), okB = consistent(1);
            if (okA == okB) throw DiagramError("pd: ambiguous once-used edge gluing");
            int parity = okA ? 0 : 1;
            std::map<long, long> repl;
            for (std::size_t i = 0; i < k; ++i) {
                if (static_cast<int>(i % 2) != parity) continue;
                // join head(once[i]) -> tail(once[i+1]): contract to once[i].
                repl[once[(i + 1) % k]] = once[i];
            }
            for (auto& c : crossings_)
                for (auto& e : c.e) {
                    auto it = repl.find(e);
                    if (it != repl.end()) e = it->second;
                }
            occ.clear();
            for (std::size_t c = 0; c < crossings_.size(); ++c)
                for (int s = 0; s < 4; ++s)
                    occ[crossings_[c].e[static_cast<std::size_t>(s)]].push_back(
                        {static_cast<int>(c), s});
        }
        for (auto& [e, v] : occ) {
            if (v.size() != 2)
                throw DiagramError("pd: edge " + std::to_string(e) + " appears " +
                                   std::to_string(v.size()) + " times (expected 2)");
            edge_ends_[e] = {v[0], v[1]};
        }
    }

    void orient_and_sign() {
        n_pd_components_ = 0;
        if (crossings_.empty()) return;
        head_att_.assign(static_cast<std::size_t>(att_count()), false);
        std::vector<bool> visited(static_cast<std::size_t>(att_count()), false);

        auto walk_from = [&](int c0, int s0) {
            int c = c0, s = s0;
            do {
                // depart along edge at (c,s)
                visited[static_cast<std::size_t>(att_id(c, s))] = true;
                auto [mc, ms] = mate_of(c, s);
                int arr = att_id(mc, ms);
                if (visited[static_cast<std::size_t>(arr)])
                    throw DiagramError("pd: inconsistent strand orientation");
                visited[static_cast<std::size_t>(arr)] = true;
                head_att_[static_cast<std::size_t>(arr)] = true;
                component_of_edge_[crossings_[static_cast<std::size_t>(mc)].e[static_cast<std::size_t>(ms)]] =
                    n_pd_components_;
                c = mc;
                s = (ms + 2) % 4;
            } while (!(c == c0 && s == s0));
        };

        // Seed at under-strand exits; they fix the orientation of every
        // component that passes under somewhere.
        for (std::size_t c0 = 0; c0 < crossings_.size(); ++c0)
            if (!visited[static_cast<std::size_t>(att_id(static_cast<int>(c0), 2))] &&
                !visited[static_cast<std::size_t>(att_id(static_cast<int>(c0), 0))]) {
                walk_from(static_cast<int>(c0), 2);
                ++n_pd_components_;
            }
        // Components that only ever pass over: orient from the smallest
        // unvisited attachment.
        for (int a = 0; a < att_count(); ++a)
            if (!visited[static_cast<std::size_t>(a)]) {
                auto [c, s] = att_pos(a);
                walk_from(c, s);
                ++n_pd_components_;
            }

        for (std::size_t c = 0; c < crossings_.size(); ++c) {
            int ci = static_cast<int>(c);
            if (!head_att_[static_cast<std::size_t>(att_id(ci, 0))] ||
                head_att_[static_cast<std::size_t>(att_id(ci, 2))])
                throw DiagramError("pd: under-strand direction violates slot convention");
            bool over_in_2 = head_att_[static_cast<std::size_t>(att_id(ci, 1))];
            bool over_in_4 = head_att_[static_cast<std::size_t>(att_id(ci, 3))];
            if (over_in_2 == over_in_4) throw DiagramError("pd: over-strand direction inconsistent");
            sign_[c] = over_in_2 ? +1 : -1;
            (sign_[c] > 0 ? n_plus_ : n_minus_)++;
        }
    }

    void trace_faces() {
        face_of_att_.assign(static_cast<std::size_t>(att_count()), -1);
        face_count_ = 0;
        face_shaded_.clear();
        outer_face_ = 0;
        if (crossings_.empty()) return;

        std::vector<int> face_size;
        for (int a0 = 0; a0 < att_count(); ++a0) {
            if (face_of_att_[static_cast<std::size_t>(a0)] != -1) continue;
            int f = face_count_++;
            int sz = 0;
            int a = a0;
            do {
                face_of_att_[static_cast<std::size_t>(a)] = f;
                ++sz;
                auto [c, s] = att_pos(a);
                auto [mc, ms] = mate_of(c, (s + 1) % 4); // next slot clockwise
                a = att_id(mc, ms);
            } while (a != a0);
            face_size.push_back(sz);
        }
        long V = n(), E = 2 * n(), Fc = face_count_;
        if (V - E + Fc != 2)
            throw DiagramError("pd: face count violates planarity (V-E+F = " +
                               std::to_string(V - E + Fc) + ")");

        // Deterministic unbounded face: largest, then lowest attachment id.
        outer_face_ = 0;
        for (int f = 1; f < face_count_; ++f)
            if (face_size[static_cast<std::size_t>(f)] > face_size[static_cast<std::size_t>(outer_face_)])
                outer_face_ = f;

        // Checkerboard 2-coloring by BFS across edges.
        face_shaded_.assign(static_cast<std::size_t>(face_count_), 0);
        std::vector<int> state(static_cast<std::size_t>(face_count_), -1);
        std::vector<int> queue{outer_face_};
        state[static_cast<std::size_t>(outer_face_)] = 0;
        while (!queue.empty()) {
            int f = queue.back();
            queue.pop_back();
            for (auto& [e, occ] : edge_ends_) {
                int fa = face_of_att_[static_cast<std::size_t>(att_id(occ[0].first, occ[0].second))];
                int fb = face_of_att_[static_cast<std::size_t>(att_id(occ[1].first, occ[1].second))];
                for (auto [x, y] : {std::make_pair(fa, fb), std::make_pair(fb, fa)}) {
                    if (x != f) continue;
                    if (state[static_cast<std::size_t>(y)] == -1) {
                        state[static_cast<std::size_t>(y)] = 1 - state[static_cast<std::size_t>(x)];
                        queue.push_back(y);
                    } else if (state[static_cast<std::size_t>(y)] == state[static_cast<std::size_t>(x)]) {
                        throw DiagramError("pd: faces admit no checkerboard coloring");
                    }
                }
            }
        }
        for (int f = 0; f < face_count_; ++f)
            face_shaded_[static_cast<std::size_t>(f)] = state[static_cast<std::size_t>(f)] == 1;
    }

    std::vector<Crossing> crossings_;
    std::vector<int> sign_;
    std::vector<bool> bare_ccw_;
    std::optional<long> basepoint_;

    std::map<long, std::array<std::pair<int, int>, 2>> edge_ends_;
    std::vector<long> edge_labels_;
    std::vector<bool> head_att_;
    std::map<long, int> component_of_edge_;
    int n_pd_components_ = 0;
    int n_plus_ = 0, n_minus_ = 0;
    long bare_label_base_ = 1;

    std::vector<int> face_of_att_;
    std::vector<std::uint8_t> face_shaded_;
    int face_count_ = 0;
    int outer_face_ = 0;
};

} // namespace equikh
