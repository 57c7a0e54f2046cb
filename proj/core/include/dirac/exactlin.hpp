#pragma once

// Exact rational linear algebra and the category of linear relations.
//
// Everything here is tolerance-free: subspaces are kept in reduced row-echelon
// form so that equality of subspaces is equality of their canonical bases.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace dirac::lin {

using Rat = mpq_class;
using Vec = std::vector<Rat>;

/// Canonical "p/q" text form (denominator always present).
std::string to_string(const Rat& r);

/// Accepts "p/q", integers, and finite decimals such as "-1.25e-3".
Rat parse_rat(std::string_view text);

/// Dense row-major rational matrix.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols);
    Mat(std::initializer_list<std::initializer_list<Rat>> rows);

    static Mat identity(std::size_t n);
    static Mat from_rows(const std::vector<Vec>& rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    Rat& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rat& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Rat> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<Rat> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    const std::vector<Rat>& entries() const noexcept { return data_; }

    void append_row(std::span<const Rat> values);
    void swap_rows(std::size_t a, std::size_t b);

    Mat transpose() const;
    /// Columns listed in `cols`, in that order (repeats allowed).
    Mat select_cols(std::span<const std::size_t> cols) const;
    Mat negated() const;

    friend Mat operator*(const Mat& a, const Mat& b);
    friend Mat operator+(const Mat& a, const Mat& b);
    friend bool operator==(const Mat& a, const Mat& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rat> data_;
};

/// Stacks a above b (equal column counts).
Mat vstack(const Mat& a, const Mat& b);
/// Places a to the left of b (equal row counts).
Mat hstack(const Mat& a, const Mat& b);
/// Block-diagonal a ⊕ b.
Mat block_diag(const Mat& a, const Mat& b);

Vec mat_vec(const Mat& m, std::span<const Rat> v);
Rat dot(std::span<const Rat> a, std::span<const Rat> b);

struct RrefResult {
    Mat reduced;                      ///< nonzero rows only
    std::vector<std::size_t> pivots;  ///< strictly increasing
};

/// Exact reduced row-echelon form with zero rows removed.
RrefResult rref(const Mat& m);

/// Basis (as rows) of { x : m·x = 0 }.
Mat null_space(const Mat& m);

/// A linear subspace of K^n held by its canonical (RREF) basis.
class Subspace {
public:
    Subspace() = default;

    /// Row space of `rows`; `rows.cols()` is the ambient dimension.
    static Subspace span(const Mat& rows);
    static Subspace span(std::size_t ambient, const Mat& rows);
    /// { x : constraints·x = 0 }.
    static Subspace kernel(const Mat& constraints);
    static Subspace kernel(std::size_t ambient, const Mat& constraints);
    static Subspace zero(std::size_t ambient);
    static Subspace full(std::size_t ambient);

    std::size_t ambient() const noexcept { return ambient_; }
    std::size_t rank() const noexcept { return basis_.rows(); }
    const Mat& basis() const noexcept { return basis_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    bool contains(std::span<const Rat> v) const;
    bool contains(const Subspace& other) const;

    /// Rows c with basis·c = 0; the subspace is exactly the kernel of this matrix.
    Mat constraints() const;

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

private:
    std::size_t ambient_ = 0;
    Mat basis_;
    std::vector<std::size_t> pivots_;
};

enum class SubspaceOp { sum, intersect };

Subspace subspace_op(const Subspace& a, const Subspace& b, SubspaceOp kind);
inline Subspace operator+(const Subspace& a, const Subspace& b) { return subspace_op(a, b, SubspaceOp::sum); }
Subspace intersect(const Subspace& a, const Subspace& b);

/// Image of U under the map x ↦ map·x (map is out×ambient).
Subspace image(const Subspace& u, const Mat& map);
/// Image of U under the coordinate selection x ↦ (x[coords[0]], x[coords[1]], ...).
Subspace project(const Subspace& u, std::span<const std::size_t> coords);
/// U ⊕ W inside K^(a+b).
Subspace direct_sum(const Subspace& u, const Subspace& w);

/// A linear relation dom ⇸ cod, stored as a subspace of K^dom ⊕ K^cod.
class LinRel {
public:
    LinRel() = default;
    LinRel(std::size_t dom, std::size_t cod, Subspace graph_space);

    /// graph(L) = {(v, Lv)} for L of shape cod×dom.
    static LinRel graph(const Mat& l);
    /// cograph(L) = {(Lv, v)}: the opposite relation of graph(L).
    static LinRel cograph(const Mat& l);
    static LinRel identity(std::size_t n);

    std::size_t dom() const noexcept { return dom_; }
    std::size_t cod() const noexcept { return cod_; }
    const Subspace& graph_space() const noexcept { return space_; }

    bool relates(std::span<const Rat> u, std::span<const Rat> w) const;
    LinRel opposite() const;

    friend bool operator==(const LinRel& a, const LinRel& b) = default;

private:
    std::size_t dom_ = 0;
    std::size_t cod_ = 0;
    Subspace space_;
};

/// s ∘ r  (first r, then s).
LinRel compose(const LinRel& r, const LinRel& s);
/// r ⊕ s : dom_r + dom_s ⇸ cod_r + cod_s.
LinRel direct_sum(const LinRel& r, const LinRel& s);

enum class JunctionKind { sum, match };

/// Summing (Σ inputs = Σ outputs per coordinate) or matching (all wires equal)
/// junction between m and n wires of dimension d.
LinRel junction(JunctionKind kind, std::size_t m, std::size_t n, std::size_t d);

} // namespace dirac::lin
