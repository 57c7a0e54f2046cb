#pragma once

// Dirac structures and Dirac relations.
//
// A Dirac relation R : V ⇸ W is a Dirac structure on V̄ ⊕ W. Its subspace is
// stored on the coordinates (dom, cod) of that dual-twisted sum. Composition is
// ordinary relational composition; the result is re-checked for Dirac-ness.

#include <cstddef>
#include <string>
#include <vector>

#include "dirac/bondspace.hpp"
#include "dirac/exactlin.hpp"

namespace dirac {

using bond::BondSpace;
using lin::Mat;
using lin::Rat;
using lin::Subspace;

class DiracStructure {
public:
    /// Throws DiracCheckError unless `sub` equals its own polar in `space`.
    DiracStructure(BondSpace space, Subspace sub);

    const BondSpace& space() const noexcept { return space_; }
    const Subspace& sub() const noexcept { return sub_; }

    friend bool operator==(const DiracStructure&, const DiracStructure&) = default;

private:
    BondSpace space_;
    Subspace sub_;
};

class DiracRelation {
public:
    /// `sub` lives on dual(dom) ⊕ cod. Throws DiracCheckError if it is not Dirac there.
    DiracRelation(BondSpace dom, BondSpace cod, Subspace sub);

    static DiracRelation identity(const BondSpace& v);
    /// A Dirac structure on V viewed as a relation 𝔹⁰ ⇸ V.
    static DiracRelation from_structure(const DiracStructure& d);

    const BondSpace& dom() const noexcept { return dom_; }
    const BondSpace& cod() const noexcept { return cod_; }
    const Subspace& sub() const noexcept { return sub_; }

    /// dual(dom) ⊕ cod.
    BondSpace total_space() const;
    lin::LinRel as_linrel() const;
    DiracStructure as_structure() const { return {total_space(), sub_}; }

    bool relates(std::span<const Rat> v, std::span<const Rat> w) const;

    friend bool operator==(const DiracRelation&, const DiracRelation&) = default;

private:
    BondSpace dom_;
    BondSpace cod_;
    Subspace sub_;
};

/// s ∘ r. Throws DimensionError on interface mismatch.
DiracRelation compose(const DiracRelation& r, const DiracRelation& s);

/// s ∘ r computed as (((R ⊕ S) ∩ Δ°) + Δ)/Δ, for cross-checking `compose`.
DiracRelation compose_by_quotient(const DiracRelation& r, const DiracRelation& s);

DiracRelation direct_sum(const DiracRelation& r, const DiracRelation& s);

/// Symmetry A ⊕ B ⇸ B ⊕ A.
DiracRelation braid(const BondSpace& a, const BondSpace& b);

/// 𝔹⁰ ⇸ V ⊕ V̄ and V̄ ⊕ V ⇸ 𝔹⁰, both the diagonal.
DiracRelation cap(const BondSpace& v);
DiracRelation cup(const BondSpace& v);

/// (𝔹^d)^{⊕count}, each port laid out as (e₁..e_d, f₁..f_d).
BondSpace ports(std::size_t count, std::size_t d, bool dual = false);

enum class JunctionType {
    zero,  ///< efforts matched, flows summed (parallel)
    one,   ///< flows matched, efforts summed (series)
};

DiracRelation make_junction(JunctionType type, std::size_t m, std::size_t n, std::size_t d);

/// Graph of e + f ↦ λe + f/λ on 𝔹^d (or 𝔹̄^d).
DiracRelation transformer(const Rat& lambda, std::size_t d = 1, bool dual = false);

enum class StructureKind { poisson, presymplectic };

/// poisson: {(φ, Jφ)} ⊂ X* ⊕ X; presymplectic: {(Jx, x)}. J must be skew.
DiracStructure from_structure_matrix(StructureKind kind, const Mat& j);

/// A Dirac structure D' with D ∩ D' = 0 and D + D' = V.
DiracStructure complementary_dirac(const DiracStructure& d);

/// π_dom(v) = π_cod(w) for every basis member (v, w).
bool preserves_power(const DiracRelation& r);

/// A relation placed in a network: its domain ports sit on `dom_bonds`, its codomain
/// ports on `cod_bonds` (bond ids index the network's bond list).
struct NetworkBox {
    std::string name;
    DiracRelation relation;
    std::vector<std::size_t> dom_bonds;
    std::vector<std::size_t> cod_bonds;
};

/// An exposed bond of a network, typed as 𝔹^d or 𝔹̄^d (d = the bond's dimension).
struct ExposedBond {
    std::size_t bond = 0;
    bool dual = false;
};

/// Every bond b carries variables (e(d_b), f(d_b)); each box constrains the variables of
/// its bonds. The result relates the exposed `dom` bonds to the exposed `cod` bonds.
/// Throws DimensionError on shape mismatches and DiracCheckError if the result is not Dirac.
DiracRelation interconnect(const std::vector<std::size_t>& bond_dims, const std::vector<NetworkBox>& boxes,
                           const std::vector<ExposedBond>& dom, const std::vector<ExposedBond>& cod);

} // namespace dirac
