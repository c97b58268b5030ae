#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "equikh/poly.hpp"

namespace equikh {

/// Sparse rows x cols matrix over R = F[U,V]. Rank questions are answered
/// over Frac(R) by fraction-free (Bareiss) elimination, so intermediate
/// entries stay polynomial.
template <CoefficientField F>
class PolyMatrix {
  public:
    PolyMatrix() = default;
    PolyMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void set(std::size_t r, std::size_t c, Poly<F> p) {
        check(r, c);
        if (p.is_zero())
            entries_.erase({r, c});
        else
            entries_[{r, c}] = std::move(p);
    }
    void add(std::size_t r, std::size_t c, const Poly<F>& p) {
        check(r, c);
        auto key = std::make_pair(r, c);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            if (!p.is_zero()) entries_[key] = p;
        } else {
            it->second = it->second + p;
            if (it->second.is_zero()) entries_.erase(it);
        }
    }
    const Poly<F>* get(std::size_t r, std::size_t c) const {
        auto it = entries_.find({r, c});
        return it == entries_.end() ? nullptr : &it->second;
    }
    const std::map<std::pair<std::size_t, std::size_t>, Poly<F>>& entries() const {
        return entries_;
    }

    PolyMatrix transposed() const {
        PolyMatrix t(cols_, rows_);
        for (auto& [rc, p] : entries_) t.entries_[{rc.second, rc.first}] = p;
        return t;
    }

    /// Append a column on the right (used for the span test).
    PolyMatrix with_column(const std::vector<Poly<F>>& col) const {
        if (col.size() != rows_) throw std::invalid_argument("PolyMatrix: column size mismatch");
        PolyMatrix m = *this;
        m.cols_ = cols_ + 1;
        for (std::size_t r = 0; r < rows_; ++r)
            if (!col[r].is_zero()) m.entries_[{r, cols_}] = col[r];
        return m;
    }

    /// Rank over Frac(R) by Bareiss elimination with full pivoting. The
    /// pivot minimizes (term count, total degree) to limit expression swell.
    std::size_t ffge_rank() const {
        std::vector<std::vector<Poly<F>>> a(rows_, std::vector<Poly<F>>(cols_));
        for (auto& [rc, p] : entries_) a[rc.first][rc.second] = p;

        std::size_t rank = 0;
        Poly<F> prev = Poly<F>::one();
        std::vector<bool> row_used(rows_, false), col_used(cols_, false);
        while (true) {
            std::size_t pr = rows_, pc = cols_;
            std::size_t best_terms = 0;
            std::uint32_t best_deg = 0;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (row_used[r]) continue;
                for (std::size_t c = 0; c < cols_; ++c) {
                    if (col_used[c] || a[r][c].is_zero()) continue;
                    std::size_t t = a[r][c].term_count();
                    std::uint32_t d = a[r][c].total_degree();
                    if (pr == rows_ || t < best_terms || (t == best_terms && d < best_deg)) {
                        pr = r;
                        pc = c;
                        best_terms = t;
                        best_deg = d;
                    }
                }
            }
            if (pr == rows_) break;
            row_used[pr] = true;
            col_used[pc] = true;
            ++rank;
            const Poly<F> pivot = a[pr][pc];
            for (std::size_t r = 0; r < rows_; ++r) {
                if (row_used[r]) continue;
                for (std::size_t c = 0; c < cols_; ++c) {
                    if (col_used[c]) continue;
                    Poly<F> num = pivot * a[r][c] - a[r][pc] * a[pr][c];
                    if (num.is_zero()) {
                        a[r][c] = Poly<F>::zero();
                        continue;
                    }
                    auto q = num.divide_exact(prev);
                    if (!q) throw std::logic_error("PolyMatrix: Bareiss division failed");
                    a[r][c] = *q;
                }
                a[r][pc] = Poly<F>::zero();
            }
            prev = pivot;
        }
        return rank;
    }

    /// Does z lie in the column span of this matrix over Frac(R)?
    bool in_column_span(const std::vector<Poly<F>>& z) const {
        std::size_t base = ffge_rank();
        return with_column(z).ffge_rank() == base;
    }

  private:
    void check(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("PolyMatrix: index out of range");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::map<std::pair<std::size_t, std::size_t>, Poly<F>> entries_;
};

} // namespace equikh
