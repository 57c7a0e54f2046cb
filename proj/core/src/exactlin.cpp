#include "dirac/exactlin.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "dirac/errors.hpp"

namespace dirac::lin {

std::string to_string(const Rat& r) {
    Rat c = r;  // values built from a (num, den) pair are not reduced by GMP
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

namespace {

mpz_class pow10(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return p;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

Rat parse_rat(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw ParseError("empty rational literal");

    bool negative = false;
    std::string_view body = s;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw ParseError("malformed rational '" + std::string(text) + "'");
        const mpz_class den_value{std::string(den)};
        if (den_value == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        Rat r{mpz_class{std::string(num)}, den_value};
        r.canonicalize();
        return negative ? Rat(-r) : r;
    }

    long exponent = 0;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = body.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6) throw ParseError("malformed exponent in '" + std::string(text) + "'");
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        body = body.substr(0, e);
    }

    std::string digits;
    long frac_len = 0;
    if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto int_part = body.substr(0, dot);
        auto frac_part = body.substr(dot + 1);
        if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty()))
            throw ParseError("malformed decimal '" + std::string(text) + "'");
        digits = std::string(int_part) + std::string(frac_part);
        frac_len = static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(body)) throw ParseError("malformed number '" + std::string(text) + "'");
        digits = std::string(body);
    }

    mpz_class num(digits);
    long shift = exponent - frac_len;
    Rat r;
    if (shift >= 0) {
        r = Rat(num * pow10(shift));
    } else {
        r = Rat(num, pow10(-shift));
        r.canonicalize();
    }
    return negative ? Rat(-r) : r;
}

// ---------------------------------------------------------------------------
// Mat

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

Mat::Mat(std::initializer_list<std::initializer_list<Rat>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows, std::size_t cols) {
    Mat m(0, cols);
    for (const auto& r : rows) m.append_row(r);
    return m;
}

void Mat::append_row(std::span<const Rat> values) {
    if (values.size() != cols_) throw DimensionError("append_row: width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

void Mat::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Mat Mat::select_cols(std::span<const std::size_t> cols) const {
    Mat out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] >= cols_) throw DimensionError("select_cols: column out of range");
            out(r, k) = (*this)(r, cols[k]);
        }
    return out;
}

Mat Mat::negated() const {
    Mat out = *this;
    for (auto& x : out.data_) x = -x;
    return out;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimensions differ");
    Mat out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Rat& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix sum: shapes differ");
    Mat out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
}

bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Mat vstack(const Mat& a, const Mat& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    if (a.cols() != b.cols()) throw DimensionError("vstack: column counts differ");
    Mat out = a;
    for (std::size_t r = 0; r < b.rows(); ++r) out.append_row(b.row(r));
    return out;
}

Mat hstack(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw DimensionError("hstack: row counts differ");
    Mat out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
        for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
    }
    return out;
}

Mat block_diag(const Mat& a, const Mat& b) {
    Mat out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) out(a.rows() + r, a.cols() + c) = b(r, c);
    return out;
}

Vec mat_vec(const Mat& m, std::span<const Rat> v) {
    if (v.size() != m.cols()) throw DimensionError("mat_vec: length mismatch");
    Vec out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), v);
    return out;
}

Rat dot(std::span<const Rat> a, std::span<const Rat> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// Elimination

RrefResult rref(const Mat& m) {
    Mat a = m;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::vector<std::size_t> pivots;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < cols && lead < rows; ++c) {
        std::size_t p = lead;
        while (p < rows && a(p, c) == 0) ++p;
        if (p == rows) continue;
        a.swap_rows(lead, p);
        Rat inv = 1 / a(lead, c);
        for (std::size_t k = c; k < cols; ++k) a(lead, k) *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lead || a(r, c) == 0) continue;
            Rat factor = a(r, c);
            for (std::size_t k = c; k < cols; ++k)
                if (a(lead, k) != 0) a(r, k) -= factor * a(lead, k);
        }
        pivots.push_back(c);
        ++lead;
    }
    Mat reduced(0, cols);
    for (std::size_t r = 0; r < lead; ++r) reduced.append_row(a.row(r));
    return {std::move(reduced), std::move(pivots)};
}

Mat null_space(const Mat& m) {
    auto [reduced, pivots] = rref(m);
    const std::size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;
    Mat basis(0, n);
    Vec x(n);
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::fill(x.begin(), x.end(), Rat(0));
        x[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -reduced(i, free);
        basis.append_row(x);
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace Subspace::span(const Mat& rows) { return span(rows.cols(), rows); }

Subspace Subspace::span(std::size_t ambient, const Mat& rows) {
    Subspace s;
    s.ambient_ = ambient;
    if (rows.rows() == 0) {
        s.basis_ = Mat(0, ambient);
        return s;
    }
    if (rows.cols() != ambient) throw DimensionError("Subspace::span: width differs from ambient");
    auto [reduced, pivots] = rref(rows);
    s.basis_ = std::move(reduced);
    s.pivots_ = std::move(pivots);
    return s;
}

Subspace Subspace::kernel(const Mat& constraints) { return kernel(constraints.cols(), constraints); }

Subspace Subspace::kernel(std::size_t ambient, const Mat& constraints) {
    if (constraints.rows() == 0) return full(ambient);
    if (constraints.cols() != ambient) throw DimensionError("Subspace::kernel: width differs from ambient");
    return span(ambient, null_space(constraints));
}

Subspace Subspace::zero(std::size_t ambient) { return span(ambient, Mat(0, ambient)); }

Subspace Subspace::full(std::size_t ambient) { return span(ambient, Mat::identity(ambient)); }

bool Subspace::contains(std::span<const Rat> v) const {
    if (v.size() != ambient_) throw DimensionError("Subspace::contains: length differs from ambient");
    Vec residual(v.begin(), v.end());
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
        Rat coeff = residual[pivots_[i]];
        if (coeff == 0) continue;
        auto row = basis_.row(i);
        for (std::size_t c = 0; c < ambient_; ++c)
            if (row[c] != 0) residual[c] -= coeff * row[c];
    }
    return std::all_of(residual.begin(), residual.end(), [](const Rat& x) { return x == 0; });
}

bool Subspace::contains(const Subspace& other) const {
    if (other.ambient_ != ambient_) throw DimensionError("Subspace::contains: ambient mismatch");
    for (std::size_t r = 0; r < other.rank(); ++r)
        if (!contains(other.basis_.row(r))) return false;
    return true;
}

Mat Subspace::constraints() const {
    if (rank() == 0) return Mat::identity(ambient_);
    return null_space(basis_);
}

Subspace subspace_op(const Subspace& a, const Subspace& b, SubspaceOp kind) {
    if (a.ambient() != b.ambient())
        throw DimensionError("subspace operation: ambient " + std::to_string(a.ambient()) + " vs " +
                             std::to_string(b.ambient()));
    if (kind == SubspaceOp::sum) return Subspace::span(a.ambient(), vstack(a.basis(), b.basis()));

    // Intersection: coefficient pairs (x, y) with x·A = y·B, i.e. the kernel of [A; -B]ᵀ.
    if (a.rank() == 0 || b.rank() == 0) return Subspace::zero(a.ambient());
    Mat stacked = vstack(a.basis(), b.basis().negated());
    Mat coeffs = null_space(stacked.transpose());
    Mat x(coeffs.rows(), a.rank());
    for (std::size_t r = 0; r < coeffs.rows(); ++r)
        for (std::size_t c = 0; c < a.rank(); ++c) x(r, c) = coeffs(r, c);
    return Subspace::span(a.ambient(), x * a.basis());
}

Subspace intersect(const Subspace& a, const Subspace& b) { return subspace_op(a, b, SubspaceOp::intersect); }

Subspace image(const Subspace& u, const Mat& map) {
    if (map.cols() != u.ambient()) throw DimensionError("image: map width differs from ambient");
    if (u.rank() == 0) return Subspace::zero(map.rows());
    return Subspace::span(map.rows(), u.basis() * map.transpose());
}

Subspace project(const Subspace& u, std::span<const std::size_t> coords) {
    for (auto c : coords)
        if (c >= u.ambient()) throw DimensionError("project: coordinate out of range");
    if (u.rank() == 0) return Subspace::zero(coords.size());
    return Subspace::span(coords.size(), u.basis().select_cols(coords));
}

Subspace direct_sum(const Subspace& u, const Subspace& w) {
    return Subspace::span(u.ambient() + w.ambient(), block_diag(u.basis(), w.basis()));
}

// ---------------------------------------------------------------------------
// LinRel

LinRel::LinRel(std::size_t dom, std::size_t cod, Subspace graph_space)
    : dom_(dom), cod_(cod), space_(std::move(graph_space)) {
    if (space_.ambient() != dom_ + cod_)
        throw DimensionError("LinRel: graph ambient " + std::to_string(space_.ambient()) + " != dom + cod " +
                             std::to_string(dom_ + cod_));
}

LinRel LinRel::graph(const Mat& l) {
    const std::size_t dom = l.cols();
    const std::size_t cod = l.rows();
    return LinRel(dom, cod, Subspace::span(dom + cod, hstack(Mat::identity(dom), l.transpose())));
}

LinRel LinRel::cograph(const Mat& l) { return graph(l).opposite(); }

LinRel LinRel::identity(std::size_t n) { return graph(Mat::identity(n)); }

bool LinRel::relates(std::span<const Rat> u, std::span<const Rat> w) const {
    if (u.size() != dom_ || w.size() != cod_) throw DimensionError("LinRel::relates: length mismatch");
    Vec joined(u.begin(), u.end());
    joined.insert(joined.end(), w.begin(), w.end());
    return space_.contains(joined);
}

LinRel LinRel::opposite() const {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cod_; ++i) order.push_back(dom_ + i);
    for (std::size_t i = 0; i < dom_; ++i) order.push_back(i);
    return LinRel(cod_, dom_, project(space_, order));
}

LinRel compose(const LinRel& r, const LinRel& s) {
    if (r.cod() != s.dom())
        throw DimensionError("compose: codomain " + std::to_string(r.cod()) + " vs domain " + std::to_string(s.dom()));
    const std::size_t u = r.dom(), v = r.cod(), w = s.cod();
    const std::size_t total = u + 2 * v + w;

    // r ⊕ s inside U ⊕ V ⊕ V ⊕ W.
    Subspace both = direct_sum(r.graph_space(), s.graph_space());

    // The middle diagonal { v = v' }.
    Mat diag(v, total);
    for (std::size_t i = 0; i < v; ++i) {
        diag(i, u + i) = 1;
        diag(i, u + v + i) = -1;
    }
    Subspace matched = intersect(both, Subspace::kernel(total, diag));

    std::vector<std::size_t> outer;
    for (std::size_t i = 0; i < u; ++i) outer.push_back(i);
    for (std::size_t i = 0; i < w; ++i) outer.push_back(u + 2 * v + i);
    return LinRel(u, w, project(matched, outer));
}

LinRel direct_sum(const LinRel& r, const LinRel& s) {
    // Coordinates of the block sum are (dom_r, cod_r, dom_s, cod_s); reorder to (dom_r, dom_s, cod_r, cod_s).
    Subspace blocks = direct_sum(r.graph_space(), s.graph_space());
    std::vector<std::size_t> order;
    const std::size_t rd = r.dom(), rc = r.cod(), sd = s.dom(), sc = s.cod();
    for (std::size_t i = 0; i < rd; ++i) order.push_back(i);
    for (std::size_t i = 0; i < sd; ++i) order.push_back(rd + rc + i);
    for (std::size_t i = 0; i < rc; ++i) order.push_back(rd + i);
    for (std::size_t i = 0; i < sc; ++i) order.push_back(rd + rc + sd + i);
    return LinRel(rd + sd, rc + sc, project(blocks, order));
}

LinRel junction(JunctionKind kind, std::size_t m, std::size_t n, std::size_t d) {
    const std::size_t wires = m + n;
    const std::size_t total = wires * d;
    Mat constraints(0, total);
    Vec row(total);
    if (kind == JunctionKind::sum) {
        for (std::size_t c = 0; c < d; ++c) {
            std::fill(row.begin(), row.end(), Rat(0));
            for (std::size_t i = 0; i < m; ++i) row[i * d + c] = 1;
            for (std::size_t j = 0; j < n; ++j) row[(m + j) * d + c] = -1;
            constraints.append_row(row);
        }
    } else {
        for (std::size_t k = 1; k < wires; ++k)
            for (std::size_t c = 0; c < d; ++c) {
                std::fill(row.begin(), row.end(), Rat(0));
                row[c] = 1;
                row[k * d + c] = -1;
                constraints.append_row(row);
            }
    }
    return LinRel(m * d, n * d, Subspace::kernel(total, constraints));
}

} // namespace dirac::lin
