#include <doctest.h>

#include <cmath>

#include "dirac/errors.hpp"
#include "dirac/io.hpp"
#include "dirac/ph_library.hpp"
#include "ph_scenarios.hpp"
#include "random_objects.hpp"

using namespace dirac;
using namespace dirac::ph;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x(i++) = d;
    return x;
}

PortInput constant_effort(double v) { return PortInput::effort([v](double) { return v; }); }
PortInput constant_flow(double v) { return PortInput::flow([v](double) { return v; }); }

// Is (ξ, φ, b) in D_x, up to a relative tolerance?
bool member(const KernelRep& k, const VectorXd& xi, const VectorXd& phi, const VectorXd& b, double tol = 1e-9) {
    const VectorXd r = k.F * xi + k.E * phi + k.G * b;
    return r.norm() <= tol * (1.0 + xi.norm() + phi.norm() + b.norm());
}

// Row spaces equal: each kernel annihilates the other's null space.
bool same_relation(const KernelRep& a, const KernelRep& b) {
    const MatrixXd ma = a.stacked(), mb = b.stacked();
    Eigen::FullPivLU<MatrixXd> lu(ma);
    const MatrixXd na = lu.kernel();
    Eigen::FullPivLU<MatrixXd> lub(mb);
    const MatrixXd nb = lub.kernel();
    return lu.rank() == lub.rank() && (mb * na).norm() < 1e-9 && (ma * nb).norm() < 1e-9;
}

} // namespace

TEST_CASE("library kernels are Dirac and gradients match finite differences") {
    testsupport::Rng rng(51);
    std::vector<PHSystem> systems{capacitor(2), wall(), pendulum(1, 9.81, 0.5), forced_pendulum(2, 9.81, 0.7),
                                  flywheel(3), tank(0.5), hovercar(2, 0.3, 0.4),
                                  testsupport::motor_flywheel(0.5, 2), testsupport::pump_tanks(2, 1, 3)};
    for (const auto& s : systems) {
        std::vector<VectorXd> samples;
        for (int i = 0; i < 100; ++i) {
            VectorXd x(static_cast<Eigen::Index>(s.state_dim));
            for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = rng.uniform(-3, 3);
            samples.push_back(x);
        }
        CAPTURE(s.name);
        for (const auto& x : samples) check_kernel(s.D(x), s.state_dim, s.boundary);
        CHECK(gradient_check(s, samples) <= 1e-5);
    }
}

TEST_CASE("capacitor under constant current") {
    const PHSystem c = capacitor(1);
    const Trajectory t = simulate(c, {constant_flow(1)}, vec({0}), 0, 1, 1e-3);
    CHECK(std::abs(t.states.back()(0) - 1) <= 1e-8);
    CHECK(std::abs(t.energies.back() - 0.5) <= 1e-8);
    CHECK(energy_audit(c, t) <= 1e-6);
    CHECK(t.max_compatibility_residual <= 1e-9);
    CHECK(std::abs(t.boundary.back()(0) - 1) <= 1e-8);  // V = q/C

    const Trajectory m = simulate(c, {constant_flow(1)}, vec({0}), 0, 1, 1e-2, Scheme::midpoint);
    CHECK(std::abs(m.states.back()(0) - 1) <= 1e-10);
    CHECK(energy_audit(c, m) <= 1e-6);

    // Effort-commanded capacitor: V fixes q, so the rate is not determined.
    CHECK_THROWS_AS(simulate(c, {constant_effort(1)}, vec({0}), 0, 1, 1e-3), SolverError);
}

TEST_CASE("immovable wall") {
    const PHSystem w = wall();
    CHECK_THROWS_AS(simulate(w, {constant_flow(0.3)}, VectorXd(0), 0, 1, 1e-2), SolverError);
    const Trajectory t = simulate(w, {constant_flow(0)}, VectorXd(0), 0, 1, 1e-2);
    CHECK(energy_audit(w, t) == 0);
    const Trajectory pushed = simulate(w, {constant_effort(5)}, VectorXd(0), 0, 1, 1e-2);
    for (const auto& b : pushed.boundary) CHECK(b(1) == 0);
    CHECK(energy_audit(w, pushed) == 0);
}

TEST_CASE("closed pendulum conserves energy at fourth order") {
    const testsupport::PendulumSetup setup;
    const double coarse = testsupport::pendulum_drift(setup, 1e-3);
    const double fine = testsupport::pendulum_drift(setup, 5e-4);
    MESSAGE("pendulum drift " << coarse << " -> " << fine);
    CHECK(coarse <= 1e-5);
    CHECK(coarse >= 8 * fine);
}

TEST_CASE("forced pendulum follows the driven equations") {
    const double m = 1.5, g = 9.81, l = 0.8;
    const PHSystem p = forced_pendulum(m, g, l);
    const VectorXd x = vec({0.3, -0.7});
    const StepSolution s = solve_step(p, {constant_effort(2.0)}, x, 0);
    CHECK(s.xi(0) == doctest::Approx(-0.7 / (m * l * l)));
    CHECK(s.xi(1) == doctest::Approx(-m * g * l * std::cos(0.3) + 2.0 * l * std::cos(0.3)));
    CHECK(s.b(1) == doctest::Approx(l * std::cos(0.3) * (-0.7 / (m * l * l))));
    const Trajectory t = simulate(p, {PortInput::effort([](double t) { return std::sin(t); })}, x, 0, 5, 1e-3);
    CHECK(energy_audit(p, t) <= 1e-4);
}

TEST_CASE("flywheel under constant torque") {
    const PHSystem f = flywheel(2);
    const Trajectory t = simulate(f, {constant_effort(0.5)}, vec({1}), 0, 2, 1e-3);
    for (std::size_t k = 0; k < t.times.size(); ++k) CHECK(std::abs(t.states[k](0) - (1 + 0.5 * t.times[k])) <= 1e-10);
    CHECK(energy_audit(f, t) <= 1e-6);
}

TEST_CASE("motor relation preserves power") {
    const auto r = motor(lin::Rat(3, 2));
    CHECK(preserves_power(r));
    // V = 2, I = 3: ω = κV = 3, τ = I/κ = 2.
    CHECK(r.relates(lin::Vec{2, 3}, lin::Vec{2, 3}));
    CHECK_FALSE(r.relates(lin::Vec{2, 3}, lin::Vec{3, 2}));
    CHECK_THROWS_AS(motor(0), DomainError);
    CHECK(preserves_power(pump(lin::Rat(2))));
}

TEST_CASE("motor and flywheel composite") {
    const double kappa = 0.5, inertia = 2;
    const PHSystem s = testsupport::motor_flywheel(kappa, inertia);
    CHECK(s.boundary.dual == std::vector<bool>{false, true});
    const VectorXd x = vec({1.3});
    const KernelRep k = s.D(x);
    // L̇ = I/κ − τ_out, V = ω/κ, ω_out = L/I_rot with boundary (V, I, τ_out, ω_out).
    const double current = 0.8, tau_out = 0.1, omega = 1.3 / inertia;
    CHECK(member(k, vec({current / kappa - tau_out}), vec({omega}), vec({omega / kappa, current, tau_out, omega})));
    CHECK_FALSE(member(k, vec({kappa * 1.0 - tau_out}), vec({omega}), vec({omega / kappa, current, tau_out, omega})));

    const Trajectory t = simulate(s, {constant_flow(current), constant_effort(0)}, vec({0}), 0, 3, 1e-3);
    for (std::size_t i = 0; i < t.times.size(); ++i)
        CHECK(std::abs(t.states[i](0) - current / kappa * t.times[i]) <= 1e-8);
    CHECK(energy_audit(s, t) <= 1e-6);
    CHECK_THROWS_AS(simulate(s, {constant_effort(1), constant_effort(0)}, vec({0}), 0, 1, 1e-3), SolverError);
}

TEST_CASE("pump between two tanks") {
    const double rho = 2, c0 = 1, c1 = 3;
    const PHSystem s = testsupport::pump_tanks(rho, c0, c1);
    const VectorXd x = vec({2.0, 1.5});
    const double omega = 0.6, ext0 = 0.2, ext1 = -0.1;
    const StepSolution sol = solve_step(s, {constant_flow(omega), constant_flow(ext0), constant_flow(ext1)}, x, 0);
    CHECK(sol.xi(0) == doctest::Approx(-omega / rho + ext0));
    CHECK(sol.xi(1) == doctest::Approx(omega / rho + ext1));
    CHECK(sol.b(0) == doctest::Approx((1.5 / c1 - 2.0 / c0) / rho));  // τ = (p₁ − p₀)/ρ
    const Trajectory t = simulate(s, {constant_flow(omega), constant_flow(ext0), constant_flow(ext1)}, x, 0, 2, 1e-3);
    CHECK(energy_audit(s, t) <= 1e-6);
}

TEST_CASE("hovercar couples force through the heading") {
    const PHSystem h = hovercar(2, 0.5, 0.3);
    const VectorXd x = vec({0, 0, 0.4, 1.0, -0.5, 0.2});
    const KernelRep k = h.D(x);
    CHECK(std::abs(k.G(3, 0) + std::cos(0.4)) < 1e-15);
    CHECK(std::abs(k.G(4, 0) + std::sin(0.4)) < 1e-15);
    const StepSolution s = solve_step(h, {constant_effort(1.5), constant_effort(0.7)}, x, 0);
    CHECK(s.xi(3) == doctest::Approx(1.5 * std::cos(0.4)));
    CHECK(s.xi(4) == doctest::Approx(1.5 * std::sin(0.4)));
    CHECK(s.xi(5) == doctest::Approx(0.3 * 0.7));
    const std::vector<PortInput> forces{PortInput::effort([](double t) { return std::sin(t); }),
                                        PortInput::effort([](double t) { return 0.5 * std::cos(2 * t); })};
    const Trajectory t = simulate(h, forces, x, 0, 5, 1e-3);
    CHECK(energy_audit(h, t) <= 1e-4);
}

TEST_CASE("applying relations") {
    const PHSystem c = capacitor(2);
    const PHSystem same = ph_apply_relation(c, DiracRelation::identity(BondSpace::standard(1)));
    for (double q : {-1.0, 0.5, 2.0}) CHECK(same_relation(same.D(vec({q})), c.D(vec({q}))));

    // Transformer λ: V' = λV, I' = I/λ, so q̇ = λI' and V' = λq/C.
    const double lambda = 3;
    const PHSystem t = ph_apply_relation(c, transformer(3));
    const double q = 1.2, i_out = 0.4;
    CHECK(member(t.D(vec({q})), vec({lambda * i_out}), vec({q / 2}), vec({lambda * q / 2, i_out})));

    // Two capacitors closed against each other: q̇₁ = −q̇₂ and equal voltages.
    const PHSystem pair = ph_tensor(capacitor(1), capacitor(2));
    const DiracRelation short_circuit(ports(2, 1), BondSpace::standard(0),
                                      lin::Subspace::kernel(lin::Mat::from_rows({{1, 0, -1, 0}, {0, 1, 0, 1}}, 4)));
    const PHSystem closed = ph_apply_relation(pair, short_circuit);
    CHECK(closed.boundary.ports() == 0);
    const KernelRep k = closed.D(vec({1, 2}));
    CHECK(member(k, vec({0.3, -0.3}), vec({1.0, 1.0}), VectorXd(0)));
    CHECK_FALSE(member(k, vec({0.3, 0.3}), vec({1.0, 1.0}), VectorXd(0)));
    CHECK_THROWS_AS(ph_apply_relation(c, transformer(2, 2)), DimensionError);
}

TEST_CASE("tensor with the unit and Hamiltonian sums") {
    const PHSystem a = ph_tensor(capacitor(1), capacitor(2));
    CHECK(a.H(vec({1, 2})) == doctest::Approx(0.5 + 1.0));
    const PHSystem u = ph_tensor(capacitor(1), ph_unit());
    const Trajectory t1 = simulate(u, {constant_flow(1)}, vec({0.5}), 0, 1, 1e-2);
    const Trajectory t2 = simulate(capacitor(1), {constant_flow(1)}, vec({0.5}), 0, 1, 1e-2);
    for (std::size_t k = 0; k < t1.times.size(); ++k) CHECK(t1.states[k](0) == t2.states[k](0));
}

TEST_CASE("forwards morphisms") {
    const PHSystem c = capacitor(1);
    auto id = [](const VectorXd& x) { return x; };
    auto id_jac = [](const VectorXd& x) { return MatrixXd::Identity(x.size(), x.size()); };
    std::vector<VectorXd> samples{vec({0.1}), vec({-2}), vec({3})};
    CHECK(check_forwards_morphism(id, id_jac, c, c, samples).passed);

    // Capacitor ⊗ (an idle, locked state with constant energy) projects onto the capacitor.
    PHSystem idle;
    idle.name = "idle";
    idle.state_dim = 1;
    idle.H = [](const VectorXd&) { return 0.0; };
    idle.grad_H = [](const VectorXd&) { return VectorXd::Zero(1); };
    idle.D = [](const VectorXd&) { return KernelRep{MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1), MatrixXd(1, 0)}; };
    const PHSystem both = ph_tensor(c, idle);
    auto proj = [](const VectorXd& x) { return x.head(1); };
    auto proj_jac = [](const VectorXd&) {
        MatrixXd j(1, 2);
        j << 1, 0;
        return j;
    };
    std::vector<VectorXd> pairs{vec({0.1, 5}), vec({-2, 1}), vec({3, -4})};
    CHECK(check_forwards_morphism(proj, proj_jac, both, c, pairs).passed);

    // Two capacitors joined at a parallel junction, projected onto the first one.
    // Capacitor ports are sinks: the junction sees them through flipped bonds.
    const DiracRelation parallel = interconnect({1, 1, 1}, {{"join", make_junction(JunctionType::zero, 1, 2, 1), {2}, {0, 1}}},
                                                {{0, false}, {1, false}}, {{2, false}});
    const PHSystem joined = ph_apply_relation(ph_tensor(capacitor(1), capacitor(1)), parallel);
    auto first = [](const VectorXd& x) { return x.head(1); };
    const auto report = check_forwards_morphism(first, proj_jac, joined, c, pairs);
    CHECK_FALSE(report.passed);
    CHECK_FALSE(report.failures.empty());
}

TEST_CASE("naturality of applying relations under the tensor") {
    const PHSystem a = capacitor(1), b = capacitor(2);
    const DiracRelation r1 = transformer(2), r2 = transformer(lin::Rat(1, 3));
    const PHSystem lhs = ph_apply_relation(ph_tensor(a, b), direct_sum(r1, r2));
    const PHSystem rhs = ph_tensor(ph_apply_relation(a, r1), ph_apply_relation(b, r2));
    const std::vector<PortInput> in{PortInput::flow([](double t) { return std::cos(t); }), constant_flow(0.5)};
    const Trajectory tl = simulate(lhs, in, vec({0.2, -0.1}), 0, 2, 1e-3);
    const Trajectory tr = simulate(rhs, in, vec({0.2, -0.1}), 0, 2, 1e-3);
    double gap = 0;
    for (std::size_t k = 0; k < tl.times.size(); ++k)
        gap = std::max({gap, (tl.states[k] - tr.states[k]).norm(), (tl.boundary[k] - tr.boundary[k]).norm()});
    CHECK(gap <= 1e-8);
}

TEST_CASE("laxator coherence up to reindexing") {
    const PHSystem a = capacitor(1), b = flywheel(2), c = capacitor(3);
    const std::vector<PortInput> in{constant_flow(1), constant_effort(-0.5),
                                    PortInput::flow([](double t) { return std::sin(t); })};
    const VectorXd x0 = vec({0.1, 0.2, 0.3});
    const Trajectory left = simulate(ph_tensor(ph_tensor(a, b), c), in, x0, 0, 1, 1e-3);
    const Trajectory right = simulate(ph_tensor(a, ph_tensor(b, c)), in, x0, 0, 1, 1e-3);
    double gap = 0;
    for (std::size_t k = 0; k < left.times.size(); ++k) gap = std::max(gap, (left.states[k] - right.states[k]).norm());
    CHECK(gap <= 1e-8);

    // Symmetry: swap factors and conjugate the state and ports by the swap.
    const Trajectory ab = simulate(ph_tensor(a, b), {in[0], in[1]}, vec({0.1, 0.2}), 0, 1, 1e-3);
    const Trajectory ba = simulate(ph_tensor(b, a), {in[1], in[0]}, vec({0.2, 0.1}), 0, 1, 1e-3);
    gap = 0;
    for (std::size_t k = 0; k < ab.times.size(); ++k) {
        gap = std::max(gap, std::abs(ab.states[k](0) - ba.states[k](1)) + std::abs(ab.states[k](1) - ba.states[k](0)));
        gap = std::max(gap, (ab.boundary[k].head(2) - ba.boundary[k].tail(2)).norm());
    }
    CHECK(gap <= 1e-8);

    // Unit on the left.
    const Trajectory ua = simulate(ph_tensor(ph_unit(), a), {in[0]}, vec({0.1}), 0, 1, 1e-3);
    const Trajectory plain = simulate(a, {in[0]}, vec({0.1}), 0, 1, 1e-3);
    gap = 0;
    for (std::size_t k = 0; k < ua.times.size(); ++k) gap = std::max(gap, (ua.states[k] - plain.states[k]).norm());
    CHECK(gap <= 1e-8);
}

TEST_CASE("domain and shape errors") {
    PHSystem c = capacitor(1);
    c.domain = {{-1, 1}};
    CHECK_THROWS_AS(simulate(c, {constant_flow(1)}, vec({0}), 0, 2, 1e-2), DomainError);
    CHECK_THROWS_AS(simulate(c, {constant_flow(1)}, vec({5}), 0, 2, 1e-2), DomainError);
    CHECK_THROWS_AS(simulate(capacitor(1), {}, vec({0}), 0, 1, 1e-2), DimensionError);
    CHECK_THROWS_AS(capacitor(-1), DomainError);
    KernelRep bad{MatrixXd::Identity(2, 1), MatrixXd::Identity(2, 1), MatrixXd::Identity(2, 2)};
    CHECK_THROWS_AS(check_kernel(bad, 1, Boundary::plain(1)), DiracCheckError);
    CHECK(isotropy_residual(bad, Boundary::plain(1)) > 0.1);
}

TEST_CASE("trajectory export") {
    const PHSystem c = capacitor(1);
    const Trajectory t = simulate(c, {constant_flow(1)}, vec({0}), 0, 0.5, 0.25);
    CHECK(trajectory_csv(c, t) == "t,x1,e1,f1,H\n0,0,0,1,0\n0.25,0.25,0.25,1,0.03125\n0.5,0.5,0.5,1,0.125\n");
}
