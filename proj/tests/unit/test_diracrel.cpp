#include <doctest.h>

#include "dirac/diracrel.hpp"
#include "dirac/errors.hpp"
#include "random_objects.hpp"

using namespace dirac;
using lin::Vec;
using testsupport::Rng;

namespace {

bool is_dirac(const DiracRelation& r) {
    return 2 * r.sub().rank() == r.total_space().dim() && bond::classify(r.total_space(), r.sub()).dirac;
}

} // namespace

TEST_CASE("transformers compose multiplicatively") {
    CHECK(compose(transformer(2), transformer(3)) == transformer(6));
    CHECK(transformer(1) == DiracRelation::identity(BondSpace::standard(1)));
    CHECK(transformer(Rat(1, 2), 2) == compose(transformer(Rat(1, 4), 2), transformer(2, 2)));
    auto t2 = transformer(2);
    CHECK(t2.relates(Vec{1, 4}, Vec{2, 2}));
    CHECK(preserves_power(t2));
    CHECK(preserves_power(transformer(-3)));
    CHECK(transformer(-3).relates(Vec{1, 3}, Vec{-3, -1}));
    CHECK_THROWS_AS(transformer(0), DomainError);
}

TEST_CASE("identity is a two-sided unit") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto r = testsupport::random_dirac_relation(rng, rng.uniform_int(0, 3), rng.uniform_int(0, 3));
        CHECK(compose(DiracRelation::identity(r.dom()), r) == r);
        CHECK(compose(r, DiracRelation::identity(r.cod())) == r);
    }
}

TEST_CASE("junction membership and fusion") {
    auto z = make_junction(JunctionType::zero, 2, 1, 1);
    CHECK(z.relates(Vec{5, 1, 5, 2}, Vec{5, 3}));
    CHECK_FALSE(z.relates(Vec{5, 1, 4, 2}, Vec{5, 3}));
    CHECK_FALSE(z.relates(Vec{5, 1, 5, 2}, Vec{5, 4}));
    auto one = make_junction(JunctionType::one, 2, 1, 1);
    CHECK(one.relates(Vec{1, 7, 2, 7}, Vec{3, 7}));
    CHECK_FALSE(one.relates(Vec{1, 7, 2, 6}, Vec{3, 7}));
    CHECK(make_junction(JunctionType::zero, 1, 1, 1) == DiracRelation::identity(BondSpace::standard(1)));
    CHECK(make_junction(JunctionType::one, 1, 1, 2) == DiracRelation::identity(BondSpace::standard(2)));
    auto fused = compose(direct_sum(DiracRelation::identity(BondSpace::standard(1)), make_junction(JunctionType::zero, 1, 1, 1)),
                         make_junction(JunctionType::zero, 2, 1, 1));
    CHECK(fused == make_junction(JunctionType::zero, 2, 1, 1));
    for (std::size_t m = 1; m <= 3; ++m)
        for (std::size_t n = 1; n <= 3; ++n) {
            auto lhs = compose(direct_sum(make_junction(JunctionType::one, m, 1, 1),
                                          DiracRelation::identity(BondSpace::standard(1))),
                               make_junction(JunctionType::one, 2, n, 1));
            CHECK(lhs == make_junction(JunctionType::one, m + 1, n, 1));
            CHECK(preserves_power(make_junction(JunctionType::zero, m, n, 2)));
        }
    CHECK_THROWS_AS(make_junction(JunctionType::zero, 0, 0, 1), DimensionError);
}

TEST_CASE("Poisson and presymplectic structures") {
    lin::Mat j{{0, 1}, {-1, 0}};
    auto p = from_structure_matrix(StructureKind::poisson, j);
    CHECK(p.sub().contains(Vec{1, 0, 0, -1}));  // φ = e₁ gives flow J e₁ = (0, -1)
    auto zero = from_structure_matrix(StructureKind::poisson, lin::Mat(2, 2));
    CHECK(zero.sub() == lin::Subspace::span(lin::Mat{{1, 0, 0, 0}, {0, 1, 0, 0}}));
    // {(φ, Jφ)} equals {(Kx, x)} with K = J⁻¹, which is −J for this J.
    lin::Mat jinv{{0, -1}, {1, 0}};
    CHECK(p == from_structure_matrix(StructureKind::presymplectic, jinv));
    CHECK_FALSE(p == from_structure_matrix(StructureKind::presymplectic, j));
    CHECK_THROWS_AS(from_structure_matrix(StructureKind::poisson, lin::Mat{{0, 1}, {1, 0}}), DomainError);
    Rng rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = rng.uniform_int(0, 5);
        CHECK_NOTHROW(from_structure_matrix(rng.coin() ? StructureKind::poisson : StructureKind::presymplectic,
                                            testsupport::random_skew(rng, n)));
    }
}

TEST_CASE("complementary Dirac structures") {
    auto check = [](const DiracStructure& d) {
        auto c = complementary_dirac(d);
        CHECK(lin::intersect(d.sub(), c.sub()).rank() == 0);
        CHECK((d.sub() + c.sub()).rank() == d.space().dim());
        CHECK(bond::classify(c.space(), c.sub()).dirac);
    };
    check(DiracStructure(BondSpace::standard(1), lin::Subspace::span(lin::Mat{{1, 0}})));
    check(from_structure_matrix(StructureKind::poisson, lin::Mat{{0, 1}, {-1, 0}}));
    auto trivial = DiracStructure(BondSpace(), lin::Subspace::zero(0));
    CHECK(complementary_dirac(trivial) == trivial);
    Rng rng(33);
    for (int trial = 0; trial < 60; ++trial) check(testsupport::random_dirac_structure(rng, rng.uniform_int(1, 4)));
}

TEST_CASE("cap and cup satisfy the zigzag identities") {
    for (std::size_t n = 0; n <= 3; ++n)
        for (bool dual : {false, true}) {
            auto v = BondSpace::standard(n, dual);
            auto id = DiracRelation::identity(v);
            auto left = compose(direct_sum(id, cap(v.dual())), direct_sum(cup(v.dual()), id));
            // V → V ⊕ V̄ ⊕ V → V, using cap of V̄ (V̄ ⊕ V) and cup of V̄ (V ⊕ V̄ → 0).
            CHECK(left == id);
            auto right = compose(direct_sum(cap(v), id), direct_sum(id, cup(v)));
            CHECK(right == id);
            CHECK(compose_by_quotient(direct_sum(cap(v), id), direct_sum(id, cup(v))) == id);
        }
}

TEST_CASE("braid is an involution") {
    auto a = BondSpace::standard(1), b = BondSpace::standard(2, true);
    CHECK(compose(braid(a, b), braid(b, a)) == DiracRelation::identity(bond::direct_sum(a, b)));
}

TEST_CASE("random compositions agree with the quotient formula") {
    Rng rng(34);
    for (int trial = 0; trial < 120; ++trial) {
        auto r = testsupport::random_dirac_relation(rng, rng.uniform_int(0, 4), rng.uniform_int(0, 4));
        auto s = testsupport::random_dirac_relation(rng, r.cod().half_dim(), rng.uniform_int(0, 4));
        auto c = compose(r, s);
        REQUIRE(c == compose_by_quotient(r, s));
        REQUIRE(is_dirac(c));
        REQUIRE(preserves_power(c));
    }
}

TEST_CASE("monoidal interchange and associativity") {
    Rng rng(35);
    for (int trial = 0; trial < 40; ++trial) {
        auto r1 = testsupport::random_dirac_relation(rng, rng.uniform_int(0, 2), rng.uniform_int(0, 2));
        auto s1 = testsupport::random_dirac_relation(rng, r1.cod().half_dim(), rng.uniform_int(0, 2));
        auto r2 = testsupport::random_dirac_relation(rng, rng.uniform_int(0, 2), rng.uniform_int(0, 2));
        auto s2 = testsupport::random_dirac_relation(rng, r2.cod().half_dim(), rng.uniform_int(0, 2));
        REQUIRE(compose(direct_sum(r1, r2), direct_sum(s1, s2)) == direct_sum(compose(r1, s1), compose(r2, s2)));
        auto t = testsupport::random_dirac_relation(rng, s1.cod().half_dim(), rng.uniform_int(0, 2));
        REQUIRE(compose(compose(r1, s1), t) == compose(r1, compose(s1, t)));
    }
}

TEST_CASE("construction rejects non-Dirac subspaces") {
    auto b = BondSpace::standard(1);
    CHECK_THROWS_AS(DiracRelation(b, b, lin::Subspace::span(lin::Mat{{1, 0, 0, 0}})), DiracCheckError);
    CHECK_THROWS_AS(DiracStructure(b, lin::Subspace::span(lin::Mat{{1, 1}})), DiracCheckError);
    CHECK_THROWS_AS(compose(transformer(2), DiracRelation::identity(BondSpace::standard(2))), DimensionError);
}
