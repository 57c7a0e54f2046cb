#include "dirac/bondspace.hpp"

#include <utility>

#include "dirac/errors.hpp"

namespace dirac::bond {

Signature signature(const Mat& symmetric) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw DimensionError("signature: form is not square");
    Mat a = symmetric;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a(i, j) != a(j, i)) throw DomainError("signature: form is not symmetric");

    Signature sig;
    std::size_t k = 0;
    // Congruence elimination on the trailing block a[k.., k..].
    while (k < n) {
        std::size_t p = k;
        while (p < n && a(p, p) == 0) ++p;
        if (p == n) {
            // No usable diagonal entry: fold a nonzero off-diagonal entry onto the diagonal.
            std::size_t oi = n, oj = n;
            for (std::size_t i = k; i < n && oi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (a(i, j) != 0) {
                        oi = i;
                        oj = j;
                        break;
                    }
            if (oi == n) break;  // remaining block is zero
            // Replace basis vector e_i by e_i + e_j: row/col i += row/col j.
            for (std::size_t c = 0; c < n; ++c) a(oi, c) += a(oj, c);
            for (std::size_t r = 0; r < n; ++r) a(r, oi) += a(r, oj);
            p = oi;
        }
        // Move pivot to position k.
        if (p != k) {
            a.swap_rows(p, k);
            for (std::size_t r = 0; r < n; ++r) std::swap(a(r, p), a(r, k));
        }
        const Rat pivot = a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            if (a(r, k) == 0) continue;
            Rat factor = a(r, k) / pivot;
            for (std::size_t c = k; c < n; ++c) a(r, c) -= factor * a(k, c);
            for (std::size_t rr = k; rr < n; ++rr) a(rr, r) -= factor * a(rr, k);
        }
        if (pivot > 0)
            ++sig.positive;
        else
            ++sig.negative;
        ++k;
    }
    sig.degenerate = n - sig.positive - sig.negative;
    return sig;
}

BondSpace::BondSpace(Mat pform) : pform_(std::move(pform)) {
    const auto sig = signature(pform_);  // throws on non-square / non-symmetric
    if (sig.degenerate != 0 || sig.positive != sig.negative)
        throw DomainError("bond space form must have split signature (n, n); got (" + std::to_string(sig.positive) +
                          ", " + std::to_string(sig.negative) + ", " + std::to_string(sig.degenerate) + ")");
}

BondSpace BondSpace::standard(std::size_t n, bool dual) {
    Mat p(2 * n, 2 * n);
    const Rat half = dual ? Rat(-1, 2) : Rat(1, 2);
    for (std::size_t i = 0; i < n; ++i) {
        p(i, n + i) = half;
        p(n + i, i) = half;
    }
    return BondSpace(std::move(p), Trusted{});
}

BondSpace BondSpace::dual() const { return BondSpace(pform_.negated(), Trusted{}); }

BondSpace direct_sum(const BondSpace& a, const BondSpace& b) {
    return BondSpace(lin::block_diag(a.pform_, b.pform_), BondSpace::Trusted{});
}

Rat pairing(const BondSpace& bs, std::span<const Rat> v, std::span<const Rat> w) {
    if (v.size() != bs.dim() || w.size() != bs.dim()) throw DimensionError("pairing: vector length differs from bond dimension");
    return lin::dot(v, lin::mat_vec(bs.pform(), w));
}

Rat power(const BondSpace& bs, std::span<const Rat> v) { return pairing(bs, v, v); }

Subspace polar(const BondSpace& bs, const Subspace& u) {
    if (u.ambient() != bs.dim())
        throw DimensionError("polar: subspace ambient " + std::to_string(u.ambient()) + " vs bond dimension " +
                             std::to_string(bs.dim()));
    if (u.rank() == 0) return Subspace::full(bs.dim());
    return Subspace::kernel(bs.dim(), u.basis() * bs.pform());
}

Classification classify(const BondSpace& bs, const Subspace& u) {
    const Subspace p = polar(bs, u);
    Classification c;
    c.isotropic = p.contains(u);
    c.coisotropic = u.contains(p);
    c.dirac = c.isotropic && c.coisotropic;
    return c;
}

} // namespace dirac::bond
