#pragma once

// Cospans of finite sets, undirected wiring diagrams, and two algebras over them:
// open graphs (glued along vertices) and Dirac relations (glued by junctions).

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "dirac/diracrel.hpp"

namespace dirac::operad {

/// A → X ← B on the skeletal sets {0..n-1}, kept in canonical form: apex elements
/// are numbered in order of first reference (left leg, then right leg), with
/// unreferenced elements last. Two cospans are equal iff they are isomorphic.
class FinCospan {
public:
    FinCospan() = default;
    FinCospan(std::vector<std::size_t> left, std::vector<std::size_t> right, std::size_t apex);

    static FinCospan identity(std::size_t n);

    const std::vector<std::size_t>& left() const noexcept { return left_; }
    const std::vector<std::size_t>& right() const noexcept { return right_; }
    std::size_t apex() const noexcept { return apex_; }

    friend bool operator==(const FinCospan&, const FinCospan&) = default;

private:
    std::vector<std::size_t> left_;
    std::vector<std::size_t> right_;
    std::size_t apex_ = 0;
};

/// Pushout composite: f : A → X ← B, g : B → Y ← C gives A → X +_B Y ← C.
FinCospan cospan_compose(const FinCospan& f, const FinCospan& g);
/// Disjoint union of cospans.
FinCospan cospan_sum(const FinCospan& f, const FinCospan& g);

/// A wiring diagram: boxes with inner[i] ports each, an outer box with `outer` ports,
/// and a cospan (Σ inner) → junctions ← outer.
class UwdOperation {
public:
    UwdOperation() = default;
    UwdOperation(std::vector<std::size_t> inner, std::size_t outer, FinCospan wiring);

    /// One box whose ports are wired straight through to the outer box.
    static UwdOperation identity(std::size_t ports);

    const std::vector<std::size_t>& inner() const noexcept { return inner_; }
    std::size_t outer() const noexcept { return outer_; }
    const FinCospan& wiring() const noexcept { return wiring_; }
    std::size_t arity() const noexcept { return inner_.size(); }
    std::size_t inner_ports() const;
    /// Index of box `slot`'s first port within the flattened inner ports.
    std::size_t port_offset(std::size_t slot) const;

    friend bool operator==(const UwdOperation&, const UwdOperation&) = default;

private:
    std::vector<std::size_t> inner_;
    std::size_t outer_ = 0;
    FinCospan wiring_;
};

/// outer ∘_slot inner: the box `slot` of `outer` is filled with the diagram `inner`.
UwdOperation uwd_substitute(const UwdOperation& outer, std::size_t slot, const UwdOperation& inner);

/// g ∘ (f₁, …, fₙ).
UwdOperation uwd_compose(const UwdOperation& g, std::span<const UwdOperation> fs);

/// σ*g: box k of the result is box sigma[k] of g.
UwdOperation uwd_permute(const UwdOperation& g, std::span<const std::size_t> sigma);

/// Operad algebra over UWDs: a value type and an action on argument lists.
template <class A>
concept OperadAlgebra = requires(const A& alg, const UwdOperation& op, std::span<const typename A::value_type> args) {
    { alg.act(op, args) } -> std::same_as<typename A::value_type>;
};

/// A graph with an interface map ι : ports → vertices.
struct OpenGraph {
    std::size_t vertices = 0;
    std::vector<std::size_t> src;
    std::vector<std::size_t> tgt;
    std::vector<std::size_t> iface;

    /// Throws DimensionError if any map leaves its range.
    void validate() const;
    std::size_t edges() const noexcept { return src.size(); }

    friend bool operator==(const OpenGraph&, const OpenGraph&) = default;
};

/// Representative of the isomorphism class (isomorphisms must respect the interface map).
OpenGraph canonical_form(const OpenGraph& g);
inline bool isomorphic(const OpenGraph& a, const OpenGraph& b) { return canonical_form(a) == canonical_form(b); }

/// Glue open graphs along the junctions of `op`; the result is in canonical form.
OpenGraph open_graph_act(const UwdOperation& op, std::span<const OpenGraph> graphs);

struct OpenGraphAlgebra {
    using value_type = OpenGraph;
    OpenGraph act(const UwdOperation& op, std::span<const OpenGraph> graphs) const {
        return open_graph_act(op, graphs);
    }
};

// ---------------------------------------------------------------------------
// The operad of Dirac relations.

struct PortType {
    std::size_t dim = 1;
    bool dual = false;
    friend bool operator==(const PortType&, const PortType&) = default;
};

/// ⊕ of standard bonds 𝔹^dim or 𝔹̄^dim, one per port.
BondSpace interface_space(std::span<const PortType> ports);

/// An operation of Op(DiracRel): a Dirac relation from the sum of the input bond
/// spaces to the output bond space.
class DiracOperation {
public:
    DiracOperation(std::vector<BondSpace> inputs, BondSpace output, DiracRelation relation);

    const std::vector<BondSpace>& inputs() const noexcept { return inputs_; }
    const BondSpace& output() const noexcept { return output_; }
    const DiracRelation& relation() const noexcept { return relation_; }

    static DiracOperation identity(const BondSpace& b);

    friend bool operator==(const DiracOperation&, const DiracOperation&) = default;

private:
    std::vector<BondSpace> inputs_;
    BondSpace output_;
    DiracRelation relation_;
};

/// outer ∘_slot inner in Op(DiracRel).
DiracOperation dirac_substitute(const DiracOperation& outer, std::size_t slot, const DiracOperation& inner);

/// op ∘ (arg₁ ⊕ ⋯ ⊕ argₙ), where argᵢ has codomain op.inputs()[i].
DiracRelation dirac_algebra_act(const DiracOperation& op, std::span<const DiracRelation> args);

/// The Dirac operation realising a typed wiring diagram: every junction becomes an
/// effort-matching, flow-summing junction on the ports attached to it (flows signed
/// by orientation). All ports on one junction must share a dimension.
DiracOperation wiring_operation(const UwdOperation& op, const std::vector<std::vector<PortType>>& box_ports,
                                const std::vector<PortType>& outer_ports);

} // namespace dirac::operad
