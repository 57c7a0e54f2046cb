#pragma once

// Bond spaces: even-dimensional spaces carrying a split quadratic power form.
//
// A single symmetric matrix P serves as both the power form π(v) = vᵀPv and the
// power bilinear form ⟨v, w⟩₊ = vᵀPw. For standard bonds P already contains the
// factor ½, so π(e + f) = ⟨e, f⟩.

#include <cstddef>
#include <span>

#include "dirac/exactlin.hpp"

namespace dirac::bond {

using lin::Mat;
using lin::Rat;
using lin::Subspace;

struct Signature {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t degenerate = 0;

    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Sylvester signature of a symmetric form, by exact symmetric congruence elimination.
Signature signature(const Mat& symmetric);

class BondSpace {
public:
    /// The zero-dimensional bond space 𝔹⁰.
    BondSpace() = default;

    /// Validates that `pform` is symmetric with signature (n, n).
    explicit BondSpace(Mat pform);

    /// 𝔹ⁿ with coordinates (e₁..eₙ, f₁..fₙ), or its dual 𝔹̄ⁿ.
    static BondSpace standard(std::size_t n, bool dual = false);

    std::size_t dim() const noexcept { return pform_.rows(); }
    std::size_t half_dim() const noexcept { return pform_.rows() / 2; }
    const Mat& pform() const noexcept { return pform_; }

    /// (V, -π).
    BondSpace dual() const;

    friend bool operator==(const BondSpace& a, const BondSpace& b) { return a.pform_ == b.pform_; }

private:
    struct Trusted {};
    BondSpace(Mat pform, Trusted) : pform_(std::move(pform)) {}

    Mat pform_;

    friend BondSpace direct_sum(const BondSpace& a, const BondSpace& b);
};

/// (V ⊕ W, π_V + π_W).
BondSpace direct_sum(const BondSpace& a, const BondSpace& b);

Rat power(const BondSpace& bs, std::span<const Rat> v);
Rat pairing(const BondSpace& bs, std::span<const Rat> v, std::span<const Rat> w);

/// U° = { v : ⟨v, u⟩₊ = 0 for all u ∈ U }.
Subspace polar(const BondSpace& bs, const Subspace& u);

struct Classification {
    bool isotropic = false;
    bool coisotropic = false;
    bool dirac = false;
};

Classification classify(const BondSpace& bs, const Subspace& u);

} // namespace dirac::bond
