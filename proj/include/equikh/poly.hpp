#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "equikh/field.hpp"

namespace equikh {

/// Monomial U^u V^v. Ordered graded-lexicographically with U > V; that
/// order is also the canonical printing order (leading term first).
struct Monomial {
    std::uint32_t u = 0;
    std::uint32_t v = 0;

    std::uint32_t total() const { return u + v; }
    bool operator==(const Monomial& o) const = default;
    bool operator<(const Monomial& o) const {
        if (total() != o.total()) return total() < o.total();
        return u < o.u;
    }
    bool divides(const Monomial& o) const { return u <= o.u && v <= o.v; }
    Monomial operator*(const Monomial& o) const { return {u + o.u, v + o.v}; }
    Monomial operator/(const Monomial& o) const {
        if (!o.divides(*this)) throw std::domain_error("Monomial: non-divisible quotient");
        return {u - o.u, v - o.v};
    }
};

/// Sparse element of R = F[U,V]. Zero coefficients are never stored.
/// gr(U) = gr(V) = -2, so a monomial contributes -2*(u+v) to any grading.
template <CoefficientField F>
class Poly {
  public:
    using Terms = std::map<Monomial, F>;

    Poly() = default;
    explicit Poly(F c) {
        if (!c.is_zero()) terms_[Monomial{}] = c;
    }

    static Poly zero() { return Poly{}; }
    static Poly one() { return Poly{F::one()}; }
    static Poly constant(long long n) { return Poly{F::from_int(n)}; }
    static Poly monomial(std::uint32_t mu, std::uint32_t mv, F c = F::one()) {
        Poly p;
        if (!c.is_zero()) p.terms_[Monomial{mu, mv}] = c;
        return p;
    }
    static Poly U() { return monomial(1, 0); }
    static Poly V() { return monomial(0, 1); }
    /// V - U, the generator of all torsion in this theory.
    static Poly VmU() { return V() - U(); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{});
    }
    /// The coefficient of U^0 V^0.
    F constant_term() const {
        auto it = terms_.find(Monomial{});
        return it == terms_.end() ? F::zero() : it->second;
    }

    std::uint32_t total_degree() const {
        if (terms_.empty()) throw std::domain_error("Poly: degree of zero");
        return terms_.rbegin()->first.total();
    }
    std::uint32_t max_u_degree() const {
        std::uint32_t m = 0;
        for (auto& [mono, c] : terms_) m = std::max(m, mono.u);
        return m;
    }
    std::uint32_t max_v_degree() const {
        std::uint32_t m = 0;
        for (auto& [mono, c] : terms_) m = std::max(m, mono.v);
        return m;
    }
    /// All monomials share one total degree (differential entries do).
    bool is_total_degree_homogeneous(std::uint32_t d) const {
        for (auto& [mono, c] : terms_)
            if (mono.total() != d) return false;
        return true;
    }

    void add_term(Monomial m, F c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }
    Poly operator-(const Poly& o) const {
        Poly r = *this;
        for (auto& [m, c] : o.terms_) r.add_term(m, -c);
        return r;
    }
    Poly operator-() const {
        Poly r;
        for (auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    Poly operator*(const Poly& o) const {
        Poly r;
        for (auto& [m1, c1] : terms_)
            for (auto& [m2, c2] : o.terms_) r.add_term(m1 * m2, c1 * c2);
        return r;
    }
    Poly operator*(const F& c) const {
        Poly r;
        if (c.is_zero()) return r;
        for (auto& [m, k] : terms_) r.terms_[m] = k * c;
        return r;
    }
    Poly shifted(std::uint32_t du, std::uint32_t dv) const {
        Poly r;
        for (auto& [m, c] : terms_) r.terms_[Monomial{m.u + du, m.v + dv}] = c;
        return r;
    }
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    /// Substitute U = 0 (graded Bar-Natan specialization over F[V]).
    Poly set_u_zero() const {
        Poly r;
        for (auto& [m, c] : terms_)
            if (m.u == 0) r.terms_[m] = c;
        return r;
    }

    /// Exact division: returns q with *this == q*d, or nullopt when d does
    /// not divide. Leading-term reduction in the graded-lex order; for a
    /// divisible input every intermediate remainder stays divisible, so a
    /// non-divisible leading term certifies failure.
    std::optional<Poly> divide_exact(const Poly& d) const {
        if (d.is_zero()) throw std::domain_error("Poly: division by zero");
        Poly q, r = *this;
        const auto& [dm, dc] = *d.terms_.rbegin();
        F dinv = dc.inverse();
        while (!r.is_zero()) {
            const auto& [rm, rc] = *r.terms_.rbegin();
            if (!dm.divides(rm)) return std::nullopt;
            Monomial qm = rm / dm;
            F qc = rc * dinv;
            q.add_term(qm, qc);
            Poly mono = Poly::monomial(qm.u, qm.v, qc);
            r = r - mono * d;
        }
        return q;
    }

    /// Largest k with (V-U)^k dividing *this. Requires a nonzero input.
    std::uint32_t vu_divisibility() const {
        if (is_zero()) throw std::domain_error("Poly: (V-U)-divisibility of zero");
        Poly d = VmU();
        Poly cur = *this;
        std::uint32_t k = 0;
        while (true) {
            auto q = cur.divide_exact(d);
            if (!q) return k;
            cur = *q;
            ++k;
        }
    }

    /// Canonical text form: terms in descending graded-lex order, each
    /// printed as c*U^m*V^n with unit coefficients and zero exponents
    /// suppressed, joined by +/-.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [m, c] = *it;
            std::string cs = c.str();
            bool neg = !cs.empty() && cs[0] == '-';
            if (first) {
                if (neg) {
                    os << '-';
                    cs = cs.substr(1);
                }
            } else {
                os << (neg ? " - " : " + ");
                if (neg) cs = cs.substr(1);
            }
            first = false;
            bool has_mono = m.u != 0 || m.v != 0;
            bool unit_coeff = (cs == "1") || (cs == "1/1");
            if (!has_mono || !unit_coeff) os << cs;
            if (has_mono && !unit_coeff) os << '*';
            if (m.u > 0) {
                os << 'U';
                if (m.u > 1) os << '^' << m.u;
            }
            if (m.u > 0 && m.v > 0) os << '*';
            if (m.v > 0) {
                os << 'V';
                if (m.v > 1) os << '^' << m.v;
            }
        }
        return os.str();
    }

    /// Parse the text form produced by str(). Accepts integer or a/b
    /// coefficients, optional '*' separators, and any term order.
    static Poly parse(const std::string& s) {
        Poly out;
        std::size_t i = 0;
        auto skip_ws = [&] {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        };
        skip_ws();
        if (i >= s.size()) throw std::invalid_argument("Poly: empty input");
        bool first = true;
        while (true) {
            skip_ws();
            if (i >= s.size()) break;
            int sign = 1;
            if (s[i] == '+' || s[i] == '-') {
                sign = s[i] == '-' ? -1 : 1;
                ++i;
                skip_ws();
            } else if (!first) {
                throw std::invalid_argument("Poly: expected +/- between terms");
            }
            first = false;
            long long num = 1, den = 1;
            bool saw_number = false;
            if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                saw_number = true;
                num = 0;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                    num = num * 10 + (s[i++] - '0');
                if (i < s.size() && s[i] == '/') {
                    ++i;
                    den = 0;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                        den = den * 10 + (s[i++] - '0');
                    if (den == 0) throw std::invalid_argument("Poly: zero denominator");
                }
            }
            Monomial m;
            bool saw_var = false;
            while (true) {
                skip_ws();
                if (i < s.size() && s[i] == '*') {
                    ++i;
                    skip_ws();
                }
                if (i < s.size() && (s[i] == 'U' || s[i] == 'u' || s[i] == 'V' || s[i] == 'v')) {
                    bool isU = s[i] == 'U' || s[i] == 'u';
                    ++i;
                    std::uint32_t e = 1;
                    if (i < s.size() && s[i] == '^') {
                        ++i;
                        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
                            throw std::invalid_argument("Poly: bad exponent");
                        e = 0;
                        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                            e = e * 10 + static_cast<std::uint32_t>(s[i++] - '0');
                    }
                    (isU ? m.u : m.v) += e;
                    saw_var = true;
                } else {
                    break;
                }
            }
            if (!saw_number && !saw_var) throw std::invalid_argument("Poly: malformed term");
            F c = F::from_int(sign * num);
            if (den != 1) c = c / F::from_int(den);
            out.add_term(m, c);
        }
        return out;
    }

    bool operator<(const Poly& o) const {
        // Deterministic order for use as container keys.
        auto a = terms_.begin(), b = o.terms_.begin();
        for (; a != terms_.end() && b != o.terms_.end(); ++a, ++b) {
            if (a->first < b->first) return true;
            if (b->first < a->first) return false;
            std::string sa = a->second.str(), sb = b->second.str();
            if (sa != sb) return sa < sb;
        }
        return a == terms_.end() && b != o.terms_.end();
    }

  private:
    Terms terms_;
};

} // namespace equikh
