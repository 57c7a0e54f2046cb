#include <doctest.h>

#include <cmath>
#include <random>

#include "dirac/errors.hpp"
#include "dirac/thermo.hpp"

using namespace dirac;
using namespace dirac::thermo;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x(i++) = d;
    return x;
}

AffineRelation sum_relation(std::size_t parts) {
    AffineRelation r;
    r.x_dim = parts;
    r.y_dim = 1;
    r.A = MatrixXd::Ones(1, static_cast<Eigen::Index>(parts));
    r.B = -MatrixXd::Ones(1, 1);
    r.c = VectorXd::Zero(1);
    return r;
}

// Brute-force sup of C₁ ln U₁ + C₂ ln (U − U₁) over a uniform grid of U₁ ∈ (0, U).
double grid_two_capacities(double c1, double c2, double U, int points, double& spacing) {
    spacing = U / points;
    double best = neg_inf;
    for (int i = 1; i < points; ++i) {
        const double u1 = spacing * i;
        best = std::max(best, c1 * std::log(u1) + c2 * std::log(U - u1));
    }
    return best;
}

} // namespace

TEST_CASE("domains") {
    const ConvexDomain d = ConvexDomain::positive(2) * ConvexDomain::simplex(3) * ConvexDomain::interval(-1, 2);
    CHECK(d.dim() == 6);
    CHECK(d.contains(vec({1, 0, 0.2, 0.3, 0.5, 2})));
    CHECK_FALSE(d.contains(vec({1, -1, 0.2, 0.3, 0.5, 2})));
    CHECK_FALSE(d.contains(vec({1, 1, 0.2, 0.3, 0.6, 2})));
    CHECK_FALSE(d.contains(vec({1, 1, 0.2, 0.3, 0.5, 2.5})));
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const VectorXd x = d.sample(rng), y = d.sample(rng);
        CHECK(d.contains(x));
        CHECK(d.contains(d.mix(0.3, x, y)));
    }
    CHECK(d.equality_rows().rows() == 1);
    CHECK(ConvexDomain::point().dim() == 0);
    CHECK_THROWS_AS(ConvexDomain::interval(2, 1), DomainError);
    CHECK_THROWS_AS(ConvexDomain::simplex(0), DomainError);
    CHECK(ext_add(neg_inf, std::numeric_limits<double>::infinity()) == neg_inf);
    CHECK(ext_add(1, 2) == 3);
}

TEST_CASE("library systems") {
    CHECK(shannon(2).S(vec({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(shannon(3).S(vec({1, 0, 0})) == 0);
    const ThermoSystem bath = heat_bath(4);
    CHECK(bath.S(vec({1})) - bath.S(vec({0})) == doctest::Approx(0.25));
    CHECK(heat_capacity(2).S(vec({0})) == neg_inf);
    CHECK(heat_capacity(2).S(vec({1e-300})) < -1000);
    CHECK_THROWS_AS(heat_capacity(0), DomainError);
    CHECK_THROWS_AS(heat_bath(-1), DomainError);
    CHECK_THROWS_AS(shannon(0), DomainError);

    for (const ThermoSystem& s : {heat_capacity(3), heat_bath(2), shannon(4), ideal_mixture({0.1, -0.3, 0.2}),
                                  pressure_bath(2, 3)}) {
        CAPTURE(s.name);
        CHECK(concavity_violation(s, 500, 11) <= 1e-9);
        // Analytic derivatives agree with differences of S.
        std::mt19937_64 rng(12);
        ThermoSystem plain = s;
        plain.grad = nullptr;
        plain.hess = nullptr;
        for (int i = 0; i < 20; ++i) {
            VectorXd x = s.domain.sample(rng);
            if (s.name == "shannon") x = x.cwiseMax(0.05) / x.cwiseMax(0.05).sum();
            const VectorXd g = entropy_gradient(s, x), gfd = entropy_gradient(plain, x);
            const MatrixXd h = entropy_hessian(s, x), hfd = entropy_hessian(plain, x);
            if (s.name == "shannon") continue;  // the simplex has no room for coordinate-wise differences
            CHECK((g - gfd).norm() <= 1e-5 * (1 + g.norm()));
            CHECK((h - hfd).norm() <= 1e-3 * (1 + h.norm()));
        }
    }
}

TEST_CASE("two heat capacities exchanging energy") {
    const double c1 = 1, c2 = 2;
    const Pushforward pf(sum_relation(2), {heat_capacity(c1), heat_capacity(c2)}, ConvexDomain::positive(1));
    const Equilibrium e = pf.solve(vec({3}));
    REQUIRE(e.feasible);
    CHECK(std::abs(e.argmax(0) - 1) <= 1e-8);
    CHECK(std::abs(e.argmax(1) - 2) <= 1e-8);
    CHECK(std::abs(e.value - 2 * std::log(2.0)) <= 1e-6);
    CHECK_FALSE(e.boundary);

    const double K = c1 * std::log(c1 / (c1 + c2)) + c2 * std::log(c2 / (c1 + c2));
    for (double U : {1.0, 3.0, 10.0}) {
        const Equilibrium eq = pf.solve(vec({U}));
        CHECK(std::abs(eq.value - ((c1 + c2) * std::log(U) + K)) <= 1e-6);
        CHECK(std::abs(c1 / eq.argmax(0) - c2 / eq.argmax(1)) <= 1e-6);
        double spacing = 0;
        const double grid = grid_two_capacities(c1, c2, U, 10000, spacing);
        CHECK(eq.value >= grid - 1e-12);
        // The grid misses the sup by at most the curvature times the squared half-spacing.
        const double curvature = c1 / std::pow(eq.argmax(0) - spacing, 2) + c2 / std::pow(eq.argmax(1) - spacing, 2);
        CHECK(eq.value - grid <= 2 * curvature * spacing * spacing);
    }

    const ThermoSystem composite = pf.system();
    CHECK(composite.S(vec({3})) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-9));
    // Conjugate of the composite: dS/dU = (C₁ + C₂)/U.
    CHECK(composite.grad(vec({3}))(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(pf.solve(vec({-1})).value == neg_inf);
    const ThermoSystem free_fiber = ent_pushforward(sum_relation(2), {heat_capacity(1), heat_capacity(2)});
    CHECK(free_fiber.S(vec({-1})) == neg_inf);
    CHECK(free_fiber.S(vec({0})) == neg_inf);
}

TEST_CASE("identity relation leaves a system unchanged") {
    const ThermoSystem id = ent_pushforward(AffineRelation::linear_map(MatrixXd::Identity(1, 1)), {heat_capacity(2)},
                                            ConvexDomain::positive(1));
    for (double u : {0.1, 1.0, 7.5}) CHECK(id.S(vec({u})) == doctest::Approx(2 * std::log(u)).epsilon(1e-10));
    const ThermoSystem ids = ent_pushforward(AffineRelation::linear_map(MatrixXd::Identity(3, 3)), {shannon(3)});
    CHECK(ids.S(vec({0.2, 0.3, 0.5})) == doctest::Approx(shannon(3).S(vec({0.2, 0.3, 0.5}))).epsilon(1e-10));
    CHECK(ids.S(vec({0.2, 0.3, 0.6})) == neg_inf);
}

TEST_CASE("tensor product") {
    const ThermoSystem hc = heat_capacity(2);
    const ThermoSystem t = thermo_tensor(heat_capacity(1), hc);
    CHECK(t.S(vec({1, 2})) == doctest::Approx(2 * std::log(2.0)));
    const ThermoSystem u = thermo_tensor(hc, thermo_unit());
    const ThermoSystem v = thermo_tensor(thermo_unit(), hc);
    for (double x : {0.3, 1.0, 4.0}) {
        CHECK(u.S(vec({x})) == hc.S(vec({x})));
        CHECK(v.S(vec({x})) == hc.S(vec({x})));
    }
    const ThermoSystem a = heat_capacity(1), b = shannon(2), c = heat_bath(3);
    const ThermoSystem l = thermo_tensor(thermo_tensor(a, b), c), r = thermo_tensor(a, thermo_tensor(b, c));
    const VectorXd x = vec({2, 0.4, 0.6, -1});
    CHECK(l.S(x) == doctest::Approx(r.S(x)).epsilon(1e-15));
    CHECK(thermo_tensor(a, b).S(vec({0, 0.5, 0.5})) == neg_inf);
}

TEST_CASE("volume and energy exchange equalize temperature and pressure") {
    // Two one-species gases share U and V; particle numbers fixed at 1 and 2.
    const ThermoSystem g1 = ideal_mixture({0.0}), g2 = ideal_mixture({0.5});
    AffineRelation r;
    r.x_dim = 6;
    r.y_dim = 2;
    r.A = MatrixXd::Zero(4, 6);
    r.B = MatrixXd::Zero(4, 2);
    r.c = VectorXd::Zero(4);
    r.A(0, 0) = r.A(0, 3) = 1;
    r.B(0, 0) = -1;  // U₁ + U₂ = U
    r.A(1, 1) = r.A(1, 4) = 1;
    r.B(1, 1) = -1;  // V₁ + V₂ = V
    r.A(2, 2) = 1;
    r.c(2) = 1;
    r.A(3, 5) = 1;
    r.c(3) = 2;
    const Pushforward pf(r, {g1, g2}, ConvexDomain::positive(2));
    const Equilibrium e = pf.solve(vec({6, 9}));
    REQUIRE(e.feasible);
    CHECK_FALSE(e.boundary);
    const VectorXd d1 = entropy_gradient(g1, e.argmax.head(3)), d2 = entropy_gradient(g2, e.argmax.tail(3));
    CHECK(std::abs(d1(0) - d2(0)) <= 1e-6);
    CHECK(std::abs(d1(1) - d2(1)) <= 1e-6);
    CHECK(e.argmax(0) == doctest::Approx(2.0));
    CHECK(e.argmax(1) == doctest::Approx(3.0));
}

TEST_CASE("grid oracle on small random compositions") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> cap(0.5, 3), total(0.5, 5), weight(0.3, 2);
    for (int trial = 0; trial < 30; ++trial) {
        const double c1 = cap(rng), c2 = cap(rng), w = weight(rng), U = total(rng);
        // U₁ + w U₂ = U over two heat capacities.
        AffineRelation r;
        r.x_dim = 2;
        r.y_dim = 1;
        r.A = MatrixXd(1, 2);
        r.A << 1, w;
        r.B = -MatrixXd::Ones(1, 1);
        r.c = VectorXd::Zero(1);
        const Equilibrium e = Pushforward(r, {heat_capacity(c1), heat_capacity(c2)}, ConvexDomain::positive(1))
                                  .solve(vec({U}));
        const int points = 20000;
        const double h = U / points;
        double best = neg_inf;
        for (int i = 1; i < points; ++i) {
            const double u1 = h * i;
            best = std::max(best, c1 * std::log(u1) + c2 * std::log((U - u1) / w));
        }
        const double curvature = c1 / std::pow(e.argmax(0) - h, 2) + c2 * w * w / std::pow(U - e.argmax(0) - h, 2);
        CHECK(e.value >= best - 1e-12);
        CHECK(e.value - best <= 2 * curvature * h * h);
        // Any feasible probe has no more entropy than the sup.
        std::uniform_real_distribution<double> probe(0.0, 1.0);
        for (int k = 0; k < 20; ++k) {
            const double u1 = U * probe(rng);
            CHECK(c1 * std::log(u1) + c2 * std::log((U - u1) / w) <= e.value + 1e-12);
        }
    }
}

TEST_CASE("a boundary argmax is reported") {
    // max ln(1 + x₁) + x₂ on [0,1]² with x₁ + x₂ = 1: the linear term wins, x₁ = 0.
    ThermoSystem s;
    s.name = "tilted";
    s.domain = ConvexDomain::interval(0, 1) * ConvexDomain::interval(0, 1);
    s.S = [](const VectorXd& x) { return std::log(1 + x(0)) + 2 * x(1); };
    const Equilibrium e = maximize_concave(s, MatrixXd::Ones(1, 2), VectorXd::Ones(1));
    CHECK(e.boundary);
    CHECK(e.argmax(0) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-8));
    // A fiber that is a single corner of the box.
    const Equilibrium corner = maximize_concave(s, MatrixXd::Ones(1, 2), VectorXd::Constant(1, 2));
    CHECK(corner.feasible);
    CHECK(corner.value == doctest::Approx(std::log(2.0) + 2));
    CHECK(corner.boundary);
    CHECK_FALSE(maximize_concave(s, MatrixXd::Ones(1, 2), VectorXd::Constant(1, 2.1)).feasible);
}

TEST_CASE("unbounded entropy is reported") {
    AffineRelation r = sum_relation(2);
    const Pushforward pf(r, {heat_bath(1), heat_bath(2)}, ConvexDomain::reals(1));
    CHECK_THROWS_AS(pf.solve(vec({0})), SolverError);
}

TEST_CASE("Helmholtz free entropy") {
    const Pushforward pf = legendre_pushforward(heat_capacity(1), 2);
    const Equilibrium e = pf.solve(VectorXd(0));
    CHECK(std::abs(e.value - (std::log(2.0) - 1)) <= 1e-8);
    CHECK(std::abs(e.argmax(0) - 2) <= 1e-7);
    // Grid oracle for sup_U ln U − U/2.
    double best = neg_inf;
    const double h = 1e-3;
    for (int i = 1; i < 20000; ++i) best = std::max(best, std::log(h * i) - h * i / 2);
    CHECK(e.value >= best - 1e-12);
    CHECK(e.value - best <= h * h);

    // Matching temperatures: C ln U at U₀ has 1/T = C/U₀.
    for (double T : {0.5, 3.0}) {
        const Equilibrium m = legendre_pushforward(heat_capacity(2.5), T).solve(VectorXd(0));
        CHECK(m.argmax(0) == doctest::Approx(2.5 * T).epsilon(1e-8));
        // Analytic Legendre transform of C ln U at 1/T.
        CHECK(std::abs(m.value - (2.5 * std::log(2.5 * T) - 2.5)) <= 1e-6);
    }

    // Composing and then evaluating equals the direct two-system pushforward.
    const ThermoSystem mix = ideal_mixture({0.2});
    const ThermoSystem free = legendre_free_entropy(mix, 1.5);
    AffineRelation direct;
    direct.x_dim = 4;
    direct.y_dim = 2;
    direct.A = MatrixXd::Zero(3, 4);
    direct.B = MatrixXd::Zero(3, 2);
    direct.c = VectorXd::Zero(3);
    direct.A(0, 0) = direct.A(0, 3) = 1;
    direct.A(1, 1) = 1;
    direct.B(1, 0) = -1;
    direct.A(2, 2) = 1;
    direct.B(2, 1) = -1;
    const ThermoSystem two = ent_pushforward(direct, {mix, heat_bath(1.5)});
    for (const VectorXd& y : {vec({1, 1}), vec({2.5, 0.4})}) CHECK(std::abs(free.S(y) - two.S(y)) <= 1e-8);
    CHECK(free.domain.dim() == 2);
}

TEST_CASE("canonical distribution") {
    const CanonicalResult two = canonical_distribution({0, 1}, 0.25);
    CHECK(std::abs(two.beta - std::log(3.0)) <= 1e-8);
    CHECK(std::abs(two.p(0) - 0.75) <= 1e-12);
    CHECK(std::abs(two.p(1) - 0.25) <= 1e-12);
    CHECK(std::abs(two.S - 0.562335) <= 1e-6);

    const CanonicalResult flat = canonical_distribution({2, 2, 2}, 2);
    CHECK(flat.beta == 0);
    CHECK((flat.p - VectorXd::Constant(3, 1.0 / 3)).norm() < 1e-15);
    CHECK(std::abs(canonical_distribution({0, 1, 5}, 2).beta) <= 1e-8);
    CHECK(canonical_distribution({0, 1, 5}, 4).beta < 0);
    CHECK_THROWS_AS(canonical_distribution({0, 1}, 1), DomainError);
    CHECK_THROWS_AS(canonical_distribution({2, 2}, 1), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0, 1);
    for (std::size_t k = 2; k <= 6; ++k)
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> H(k);
            for (auto& h : H) h = 4 * unit(rng) - 1;
            const double lo = *std::min_element(H.begin(), H.end()), hi = *std::max_element(H.begin(), H.end());
            const double U = lo + (0.1 + 0.8 * unit(rng)) * (hi - lo);
            const CanonicalResult c = canonical_distribution(H, U);
            CHECK(std::abs(c.p.dot(Eigen::Map<const VectorXd>(H.data(), static_cast<Eigen::Index>(k))) - U) <= 1e-10);
            const Equilibrium e = canonical_by_maximization(H, U);
            REQUIRE(e.feasible);
            CHECK((e.argmax - c.p).cwiseAbs().maxCoeff() <= 1e-6);
            CHECK(std::abs(e.value - c.S) <= 1e-8);
        }
}

TEST_CASE("reaction grammar") {
    const ReactionNetwork water = parse_reactions("2 H2 + O2 -> 2 H2O\n");
    CHECK(water.species == std::vector<std::string>{"H2", "O2", "H2O"});
    CHECK(format_reactions(water) == "2 H2 + O2 -> 2 H2O\n");
    const ReactionNetwork two = parse_reactions("# Haber and decomposition\nN2 + 3H2 -> 2 NH3\n\n2 NH3 -> N2 + 3 H2  # reverse\n");
    CHECK(two.reactions() == 2);
    CHECK(two.input[0] == std::vector<long>{1, 3, 0});
    CHECK(two.output[1] == std::vector<long>{1, 3, 0});
    const ReactionNetwork source = parse_reactions("-> A\nA + A -> 0\n");
    CHECK(source.input[1] == std::vector<long>{2});
    CHECK_THROWS_AS(parse_reactions("H2 + O2 = H2O"), ParseError);
    CHECK_THROWS_AS(parse_reactions("H2 + -> H2O"), ParseError);
    CHECK_THROWS_AS(parse_reactions("2 -> H2O"), ParseError);
    CHECK_THROWS_AS(parse_reactions("A -> B -> C"), ParseError);
    CHECK_THROWS_AS(parse_reactions("A$ -> B"), ParseError);
    CHECK(parse_reactions("").reactions() == 0);
}

TEST_CASE("stoichiometry") {
    const Stoichiometry w = stoichiometry(parse_reactions("2 H2 + O2 -> 2 H2O"));
    CHECK(w.nu == lin::Mat{{-2}, {-1}, {2}});
    const Stoichiometry h = stoichiometry(parse_reactions("N2 + 3 H2 -> 2 NH3"));
    CHECK(h.nu == lin::Mat{{-1}, {-3}, {2}});
    CHECK(h.subspace.rank() == 1);
    CHECK(h.conserved.rows() == 2);

    ReactionNetwork empty;
    empty.species = {"A", "B"};
    const Stoichiometry e = stoichiometry(empty);
    CHECK(e.nu.rows() == 2);
    CHECK(e.nu.cols() == 0);
    CHECK(e.project(lin::Vec{3, lin::Rat(1, 2)}) == lin::Vec{3, lin::Rat(1, 2)});

    // Conservation under random integer extents, exactly.
    const ReactionNetwork net = parse_reactions("2 H2 + O2 -> 2 H2O\nN2 + 3 H2 -> 2 NH3\nNH3 + H2O -> NH4OH\n");
    const Stoichiometry st = stoichiometry(net);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> extent(-20, 20), amount(0, 50);
    for (int trial = 0; trial < 100; ++trial) {
        lin::Vec n0(net.species.size()), xi(net.reactions());
        for (auto& v : n0) v = amount(rng);
        for (auto& v : xi) v = extent(rng);
        lin::Vec moved = lin::mat_vec(st.nu, xi);
        for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += n0[i];
        CHECK(st.project(moved) == st.project(n0));
    }
    // Projection is onto the quotient: it separates classes.
    lin::Vec other(net.species.size(), 0);
    other[0] = 1;
    CHECK(st.project(other) != st.project(lin::Vec(net.species.size(), 0)));
}

TEST_CASE("Gibbs equilibrium") {
    const ThermoSystem mix1 = ideal_mixture({0.3});
    ReactionNetwork none;
    none.species = {"A"};
    const GibbsResult g0 = gibbs_equilibrium(mix1, 2, 1, none, vec({1.5}));
    CHECK(std::abs(g0.N(0) - 1.5) <= 1e-9);
    // Inner sup: U = cNT and V = NT/p.
    CHECK(g0.U == doctest::Approx(1.5 * 1.5 * 2).epsilon(1e-8));
    CHECK(g0.V == doctest::Approx(1.5 * 2 / 1).epsilon(1e-8));

    const ThermoSystem mix = ideal_mixture({0.0, 0.4, 1.1});
    const ReactionNetwork net = parse_reactions("2 A + B -> 2 C");
    const VectorXd N0 = vec({1.0, 0.8, 0.3});
    const GibbsResult g = gibbs_equilibrium(mix, 1.3, 0.7, net, N0);
    CHECK(g.kkt_residual <= 1e-7);
    CHECK_FALSE(g.boundary);
    VectorXd x(5);
    x << g.U, g.V, g.N;
    const VectorXd dS = entropy_gradient(mix, x);
    const Stoichiometry st = stoichiometry(net);
    double affinity = 0;
    for (Eigen::Index s = 0; s < 3; ++s) affinity += st.nu(static_cast<std::size_t>(s), 0).get_d() * dS(2 + s);
    CHECK(std::abs(affinity) <= 1e-6);
    // Same composition class.
    CHECK((st.project(g.N) - st.project(N0)).norm() <= 1e-10);
    CHECK(g.N.minCoeff() > 0);

    // Doubling the stoichiometry leaves Stoch and therefore the equilibrium unchanged.
    const GibbsResult g2 = gibbs_equilibrium(mix, 1.3, 0.7, parse_reactions("4 A + 2 B -> 4 C"), N0);
    CHECK((g2.N - g.N).norm() <= 1e-8);
    CHECK_THROWS_AS(gibbs_equilibrium(mix, 1.3, 0.7, net, vec({1, 0, 1})), DomainError);
    CHECK_THROWS_AS(gibbs_equilibrium(mix1, 1.3, 0.7, net, N0), DimensionError);
}
