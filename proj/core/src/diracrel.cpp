#include "dirac/diracrel.hpp"

#include <numeric>
#include <utility>
#include <vector>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

std::vector<std::size_t> iota(std::size_t begin, std::size_t count) {
    std::vector<std::size_t> v(count);
    std::iota(v.begin(), v.end(), begin);
    return v;
}

void require_dirac(const BondSpace& space, const Subspace& sub, const char* what) {
    if (sub.ambient() != space.dim())
        throw DimensionError(std::string(what) + ": subspace ambient " + std::to_string(sub.ambient()) +
                             " vs bond dimension " + std::to_string(space.dim()));
    if (2 * sub.rank() != space.dim())
        throw DiracCheckError(std::string(what) + ": dimension " + std::to_string(sub.rank()) + " is not half of " +
                              std::to_string(space.dim()));
    const auto c = bond::classify(space, sub);
    if (!c.isotropic) throw DiracCheckError(std::string(what) + ": subspace is not isotropic");
}

} // namespace

DiracStructure::DiracStructure(BondSpace space, Subspace sub) : space_(std::move(space)), sub_(std::move(sub)) {
    require_dirac(space_, sub_, "DiracStructure");
}

DiracRelation::DiracRelation(BondSpace dom, BondSpace cod, Subspace sub)
    : dom_(std::move(dom)), cod_(std::move(cod)), sub_(std::move(sub)) {
    require_dirac(total_space(), sub_, "DiracRelation");
}

BondSpace DiracRelation::total_space() const { return bond::direct_sum(dom_.dual(), cod_); }

lin::LinRel DiracRelation::as_linrel() const { return lin::LinRel(dom_.dim(), cod_.dim(), sub_); }

bool DiracRelation::relates(std::span<const Rat> v, std::span<const Rat> w) const { return as_linrel().relates(v, w); }

DiracRelation DiracRelation::identity(const BondSpace& v) {
    return DiracRelation(v, v, lin::LinRel::identity(v.dim()).graph_space());
}

DiracRelation DiracRelation::from_structure(const DiracStructure& d) {
    return DiracRelation(BondSpace(), d.space(), d.sub());
}

DiracRelation compose(const DiracRelation& r, const DiracRelation& s) {
    if (!(r.cod() == s.dom()))
        throw DimensionError("dirac compose: codomain (dim " + std::to_string(r.cod().dim()) +
                             ") does not match domain (dim " + std::to_string(s.dom().dim()) + ")");
    lin::LinRel composite = lin::compose(r.as_linrel(), s.as_linrel());
    try {
        return DiracRelation(r.dom(), s.cod(), composite.graph_space());
    } catch (const DiracCheckError& e) {
        throw DiracCheckError(std::string("internal error: composite of Dirac relations failed the Dirac check: ") +
                              e.what());
    }
}

DiracRelation compose_by_quotient(const DiracRelation& r, const DiracRelation& s) {
    if (!(r.cod() == s.dom())) throw DimensionError("dirac compose: interface mismatch");
    const std::size_t u = r.dom().dim(), v = r.cod().dim(), w = s.cod().dim();
    const BondSpace total = bond::direct_sum(r.total_space(), s.total_space());
    const std::size_t n = total.dim();

    Mat diag_rows(v, n);
    for (std::size_t i = 0; i < v; ++i) {
        diag_rows(i, u + i) = 1;
        diag_rows(i, u + v + i) = 1;
    }
    const Subspace delta = Subspace::span(n, diag_rows);
    const Subspace delta_polar = bond::polar(total, delta);
    const Subspace both = lin::direct_sum(r.sub(), s.sub());
    const Subspace lifted = lin::intersect(both, delta_polar) + delta;

    std::vector<std::size_t> outer = iota(0, u);
    for (auto c : iota(u + 2 * v, w)) outer.push_back(c);
    return DiracRelation(r.dom(), s.cod(), lin::project(lifted, outer));
}

DiracRelation direct_sum(const DiracRelation& r, const DiracRelation& s) {
    lin::LinRel sum = lin::direct_sum(r.as_linrel(), s.as_linrel());
    return DiracRelation(bond::direct_sum(r.dom(), s.dom()), bond::direct_sum(r.cod(), s.cod()), sum.graph_space());
}

DiracRelation braid(const BondSpace& a, const BondSpace& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    Mat swap(na + nb, na + nb);  // (x_a, x_b) ↦ (x_b, x_a), shape cod × dom
    for (std::size_t i = 0; i < nb; ++i) swap(i, na + i) = 1;
    for (std::size_t i = 0; i < na; ++i) swap(nb + i, i) = 1;
    return DiracRelation(bond::direct_sum(a, b), bond::direct_sum(b, a), lin::LinRel::graph(swap).graph_space());
}

DiracRelation cap(const BondSpace& v) {
    const std::size_t n = v.dim();
    return DiracRelation(BondSpace(), bond::direct_sum(v, v.dual()),
                         Subspace::span(2 * n, lin::hstack(Mat::identity(n), Mat::identity(n))));
}

DiracRelation cup(const BondSpace& v) {
    const std::size_t n = v.dim();
    return DiracRelation(bond::direct_sum(v.dual(), v), BondSpace(),
                         Subspace::span(2 * n, lin::hstack(Mat::identity(n), Mat::identity(n))));
}

BondSpace ports(std::size_t count, std::size_t d, bool dual) {
    BondSpace out;
    const BondSpace one = BondSpace::standard(d, dual);
    for (std::size_t i = 0; i < count; ++i) out = bond::direct_sum(out, one);
    return out;
}

DiracRelation make_junction(JunctionType type, std::size_t m, std::size_t n, std::size_t d) {
    if (m + n == 0) throw DimensionError("junction needs at least one port");
    if (d == 0) throw DimensionError("junction port dimension must be positive");
    const std::size_t wires = m + n;
    const std::size_t total = 2 * d * wires;
    // zero: efforts matched, flows summed; one: the roles swap.
    const std::size_t matched_offset = type == JunctionType::zero ? 0 : d;
    const std::size_t summed_offset = d - matched_offset;
    auto matched = [&](std::size_t port, std::size_t c) { return 2 * d * port + matched_offset + c; };
    auto summed = [&](std::size_t port, std::size_t c) { return 2 * d * port + summed_offset + c; };

    Mat constraints(0, total);
    lin::Vec row(total);
    for (std::size_t k = 1; k < wires; ++k)
        for (std::size_t c = 0; c < d; ++c) {
            std::fill(row.begin(), row.end(), Rat(0));
            row[matched(0, c)] = 1;
            row[matched(k, c)] = -1;
            constraints.append_row(row);
        }
    for (std::size_t c = 0; c < d; ++c) {
        std::fill(row.begin(), row.end(), Rat(0));
        for (std::size_t i = 0; i < m; ++i) row[summed(i, c)] = 1;
        for (std::size_t j = 0; j < n; ++j) row[summed(m + j, c)] = -1;
        constraints.append_row(row);
    }
    return DiracRelation(ports(m, d), ports(n, d), Subspace::kernel(total, constraints));
}

DiracRelation transformer(const Rat& lambda, std::size_t d, bool dual) {
    if (lambda == 0) throw DomainError("transformer ratio must be nonzero");
    Mat map(2 * d, 2 * d);
    for (std::size_t c = 0; c < d; ++c) {
        map(c, c) = lambda;
        map(d + c, d + c) = 1 / lambda;
    }
    const BondSpace b = BondSpace::standard(d, dual);
    return DiracRelation(b, b, lin::LinRel::graph(map).graph_space());
}

DiracStructure from_structure_matrix(StructureKind kind, const Mat& j) {
    const std::size_t n = j.rows();
    if (j.cols() != n) throw DimensionError("structure matrix must be square");
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c)
            if (j(r, c) != -j(c, r)) throw DomainError("structure matrix must be skew-symmetric");
    // Rows are basis vectors (e, f): poisson (u_i, J u_i), presymplectic (J u_i, u_i).
    Mat rows = kind == StructureKind::poisson ? lin::hstack(Mat::identity(n), j.transpose())
                                              : lin::hstack(j.transpose(), Mat::identity(n));
    return DiracStructure(BondSpace::standard(n), Subspace::span(2 * n, rows));
}

DiracStructure complementary_dirac(const DiracStructure& d) {
    const BondSpace& space = d.space();
    const std::size_t half = space.half_dim();
    Subspace comp = Subspace::zero(space.dim());
    while (comp.rank() < half) {
        const Subspace both = d.sub() + comp;
        const Subspace comp_polar = bond::polar(space, comp);
        // Any v ∈ (D')° outside D + D' exists (D + (D')° = V).
        lin::Vec v;
        for (std::size_t r = 0; r < comp_polar.rank(); ++r)
            if (!both.contains(comp_polar.basis().row(r))) {
                auto row = comp_polar.basis().row(r);
                v.assign(row.begin(), row.end());
                break;
            }
        if (v.empty()) throw DiracCheckError("internal error: no extension vector for complementary Dirac structure");

        const Rat pv = bond::power(space, v);
        if (pv != 0) {
            // Shift v by d ∈ D ∩ (D')° with ⟨v, d⟩₊ ≠ 0 so that π(v + t d) = 0.
            const Subspace shift_space = lin::intersect(d.sub(), comp_polar);
            bool fixed = false;
            for (std::size_t r = 0; r < shift_space.rank() && !fixed; ++r) {
                auto dvec = shift_space.basis().row(r);
                const Rat p = bond::pairing(space, v, dvec);
                if (p == 0) continue;
                const Rat t = -pv / (2 * p);
                for (std::size_t c = 0; c < v.size(); ++c) v[c] += t * dvec[c];
                fixed = true;
            }
            if (!fixed) throw DiracCheckError("internal error: could not make extension vector null");
        }
        Mat rows = comp.basis();
        if (rows.rows() == 0) rows = Mat(0, space.dim());
        rows.append_row(v);
        comp = Subspace::span(space.dim(), rows);
    }
    return DiracStructure(space, comp);
}

bool preserves_power(const DiracRelation& r) {
    const std::size_t nd = r.dom().dim();
    const Mat& basis = r.sub().basis();
    for (std::size_t i = 0; i < basis.rows(); ++i) {
        auto row = basis.row(i);
        if (bond::power(r.dom(), row.subspan(0, nd)) != bond::power(r.cod(), row.subspan(nd))) return false;
    }
    return true;
}

DiracRelation interconnect(const std::vector<std::size_t>& bond_dims, const std::vector<NetworkBox>& boxes,
                           const std::vector<ExposedBond>& dom, const std::vector<ExposedBond>& cod) {
    std::vector<std::size_t> offset;
    std::size_t total = 0;
    for (auto d : bond_dims) {
        offset.push_back(total);
        total += 2 * d;
    }
    auto coords_of = [&](std::size_t bond, std::vector<std::size_t>& out) {
        if (bond >= bond_dims.size()) throw DimensionError("network: bond " + std::to_string(bond) + " does not exist");
        for (std::size_t c = 0; c < 2 * bond_dims[bond]; ++c) out.push_back(offset[bond] + c);
    };

    Mat constraints(0, total);
    lin::Vec row(total);
    for (const auto& box : boxes) {
        std::vector<std::size_t> local;
        for (auto b : box.dom_bonds) coords_of(b, local);
        const std::size_t dom_dim = local.size();
        for (auto b : box.cod_bonds) coords_of(b, local);
        if (dom_dim != box.relation.dom().dim() || local.size() - dom_dim != box.relation.cod().dim())
            throw DimensionError("network: box '" + box.name + "' has interface dimensions " +
                                 std::to_string(box.relation.dom().dim()) + " -> " +
                                 std::to_string(box.relation.cod().dim()) + " but its bonds provide " +
                                 std::to_string(dom_dim) + " -> " + std::to_string(local.size() - dom_dim));
        if (box.relation.sub().rank() == local.size()) continue;
        const Mat c = box.relation.sub().constraints();
        for (std::size_t r = 0; r < c.rows(); ++r) {
            std::fill(row.begin(), row.end(), Rat(0));
            for (std::size_t k = 0; k < local.size(); ++k) row[local[k]] += c(r, k);
            constraints.append_row(row);
        }
    }
    const Subspace solutions = Subspace::kernel(total, constraints);

    std::vector<std::size_t> exposed;
    BondSpace dom_space, cod_space;
    for (const auto& e : dom) {
        coords_of(e.bond, exposed);
        dom_space = bond::direct_sum(dom_space, BondSpace::standard(bond_dims[e.bond], e.dual));
    }
    for (const auto& e : cod) {
        coords_of(e.bond, exposed);
        cod_space = bond::direct_sum(cod_space, BondSpace::standard(bond_dims[e.bond], e.dual));
    }
    return DiracRelation(std::move(dom_space), std::move(cod_space), lin::project(solutions, exposed));
}

} // namespace dirac
