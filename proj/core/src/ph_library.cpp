#include "dirac/ph_library.hpp"

#include <cmath>
#include <set>

#include "dirac/errors.hpp"
#include "dirac/io.hpp"

namespace dirac::ph {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

KernelRep zero_kernel(Eigen::Index rows, Eigen::Index n, Eigen::Index bdim) {
    return {MatrixXd::Zero(rows, n), MatrixXd::Zero(rows, n), MatrixXd::Zero(rows, bdim)};
}

} // namespace

PHSystem capacitor(double c) {
    require_positive(c, "capacitance");
    PHSystem s;
    s.name = "capacitor";
    s.state_dim = 1;
    s.boundary = Boundary::plain(1);
    s.H = [c](const VectorXd& x) { return x(0) * x(0) / (2 * c); };
    s.grad_H = [c](const VectorXd& x) { return VectorXd::Constant(1, x(0) / c); };
    s.D = [](const VectorXd&) {
        KernelRep k = zero_kernel(2, 1, 2);
        k.F(0, 0) = 1;  // ξ = I
        k.G(0, 1) = -1;
        k.E(1, 0) = 1;  // V = φ
        k.G(1, 0) = -1;
        return k;
    };
    return s;
}

PHSystem wall() {
    PHSystem s;
    s.name = "wall";
    s.boundary = Boundary::plain(1);
    s.H = [](const VectorXd&) { return 0.0; };
    s.grad_H = [](const VectorXd&) { return VectorXd(0); };
    s.D = [](const VectorXd&) {
        KernelRep k = zero_kernel(1, 0, 2);
        k.G(0, 1) = 1;
        return k;
    };
    return s;
}

PHSystem pendulum(double m, double g, double l) {
    require_positive(m, "mass");
    require_positive(l, "length");
    PHSystem s;
    s.name = "pendulum";
    s.state_dim = 2;
    const double inertia = m * l * l;
    s.H = [=](const VectorXd& x) { return m * g * l * std::sin(x(0)) + x(1) * x(1) / (2 * inertia); };
    s.grad_H = [=](const VectorXd& x) {
        VectorXd d(2);
        d << m * g * l * std::cos(x(0)), x(1) / inertia;
        return d;
    };
    s.D = [](const VectorXd&) {
        // ξ = J φ with J = [[0, 1], [-1, 0]].
        KernelRep k = zero_kernel(2, 2, 0);
        k.F.setIdentity();
        k.E(0, 1) = -1;
        k.E(1, 0) = 1;
        return k;
    };
    return s;
}

PHSystem forced_pendulum(double m, double g, double l) {
    PHSystem s = pendulum(m, g, l);
    s.name = "forced_pendulum";
    s.boundary = Boundary::plain(1);
    s.D = [l](const VectorXd& x) {
        const double arm = l * std::cos(x(0));
        KernelRep k = zero_kernel(3, 2, 2);
        k.F(0, 0) = 1;  // θ̇ = ∂H/∂L
        k.E(0, 1) = -1;
        k.F(1, 1) = 1;  // L̇ = −∂H/∂θ + l cos θ · F
        k.E(1, 0) = 1;
        k.G(1, 0) = -arm;
        k.G(2, 1) = 1;  // v = l cos θ · ∂H/∂L
        k.E(2, 1) = -arm;
        return k;
    };
    return s;
}

PHSystem flywheel(double inertia) {
    require_positive(inertia, "moment of inertia");
    PHSystem s;
    s.name = "flywheel";
    s.state_dim = 1;
    s.boundary = Boundary::plain(1);
    s.H = [inertia](const VectorXd& x) { return x(0) * x(0) / (2 * inertia); };
    s.grad_H = [inertia](const VectorXd& x) { return VectorXd::Constant(1, x(0) / inertia); };
    s.D = [](const VectorXd&) {
        KernelRep k = zero_kernel(2, 1, 2);
        k.F(0, 0) = 1;  // L̇ = τ
        k.G(0, 0) = -1;
        k.E(1, 0) = 1;  // ω = ∂H/∂L
        k.G(1, 1) = -1;
        return k;
    };
    return s;
}

PHSystem tank(double c) {
    require_positive(c, "tank capacitance");
    PHSystem s;
    s.name = "tank";
    s.state_dim = 1;
    s.boundary = Boundary::plain(2);
    s.H = [c](const VectorXd& x) { return x(0) * x(0) / (2 * c); };
    s.grad_H = [c](const VectorXd& x) { return VectorXd::Constant(1, x(0) / c); };
    s.D = [](const VectorXd&) {
        KernelRep k = zero_kernel(3, 1, 4);
        k.F(0, 0) = 1;  // V̇ = f_a + f_b
        k.G(0, 1) = -1;
        k.G(0, 3) = -1;
        k.E(1, 0) = 1;  // p_a = φ
        k.G(1, 0) = -1;
        k.E(2, 0) = 1;  // p_b = φ
        k.G(2, 2) = -1;
        return k;
    };
    return s;
}

PHSystem hovercar(double mass, double inertia, double arm) {
    require_positive(mass, "mass");
    require_positive(inertia, "moment of inertia");
    PHSystem s;
    s.name = "hovercar";
    s.state_dim = 6;  // (r_x, r_y, θ, p_x, p_y, L)
    s.boundary = Boundary::plain(2);
    s.H = [=](const VectorXd& x) {
        return (x(3) * x(3) + x(4) * x(4)) / (2 * mass) + x(5) * x(5) / (2 * inertia);
    };
    s.grad_H = [=](const VectorXd& x) {
        VectorXd d = VectorXd::Zero(6);
        d(3) = x(3) / mass;
        d(4) = x(4) / mass;
        d(5) = x(5) / inertia;
        return d;
    };
    s.D = [arm](const VectorXd& x) {
        const double c = std::cos(x(2)), sn = std::sin(x(2));
        KernelRep k = zero_kernel(8, 6, 4);
        // Canonical part: ṙ = ∂H/∂p, θ̇ = ∂H/∂L, ṗ = −∂H/∂r + forcing, L̇ = −∂H/∂θ + forcing.
        for (int i = 0; i < 3; ++i) {
            k.F(i, i) = 1;
            k.E(i, i + 3) = -1;
            k.F(i + 3, i + 3) = 1;
            k.E(i + 3, i) = 1;
        }
        k.G(3, 0) = -c;  // ṗ_x = F_x cos θ
        k.G(4, 0) = -sn;  // ṗ_y = F_x sin θ
        k.G(5, 2) = -arm;  // L̇ = R F_y
        k.G(6, 1) = 1;  // v_x = ṙ_x cos θ + ṙ_y sin θ
        k.E(6, 3) = -c;
        k.E(6, 4) = -sn;
        k.G(7, 3) = 1;  // v_y = R θ̇
        k.E(7, 5) = -arm;
        return k;
    };
    return s;
}

DiracRelation motor(const lin::Rat& kappa) {
    if (kappa == 0) throw DomainError("motor constant must be nonzero");
    const BondSpace b = BondSpace::standard(1);
    // Coordinates (V, I, τ, ω).
    lin::Mat rows{{1, 0, 0, kappa}, {0, 1, 1 / kappa, 0}};
    return DiracRelation(b, b, lin::Subspace::span(4, rows));
}

DiracRelation pump(const lin::Rat& rho) {
    if (rho == 0) throw DomainError("pump constant must be nonzero");
    // Coordinates (τ, ω, p₀, f₀, p₁, f₁).
    const lin::Rat inv = 1 / rho;
    lin::Mat constraints{{0, -inv, 0, 0, 0, 1}, {0, inv, 0, 1, 0, 0}, {-rho, 0, -1, 0, 1, 0}};
    return DiracRelation(BondSpace::standard(1), ports(2, 1), lin::Subspace::kernel(6, constraints));
}

namespace {

double param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void only_keys(const Params& p, const std::string& name, std::set<std::string> allowed) {
    for (const auto& [k, v] : p)
        if (!allowed.count(k)) throw DomainError("unknown parameter '" + k + "' for '" + name + "'");
}

} // namespace

bool is_library_system(const std::string& name) {
    static const std::set<std::string> names{"capacitor", "wall",     "pendulum", "forced_pendulum",
                                             "flywheel",  "tank",     "hovercar"};
    return names.count(name) > 0;
}

bool is_library_relation(const std::string& name) {
    return name == "motor" || name == "pump" || name == "transformer";
}

PHSystem library_system(const std::string& name, const Params& p) {
    if (name == "capacitor") {
        only_keys(p, name, {"C"});
        return capacitor(param(p, "C", 1));
    }
    if (name == "wall") {
        only_keys(p, name, {});
        return wall();
    }
    if (name == "pendulum" || name == "forced_pendulum") {
        only_keys(p, name, {"m", "g", "l"});
        const double m = param(p, "m", 1), g = param(p, "g", 9.81), l = param(p, "l", 1);
        return name == "pendulum" ? pendulum(m, g, l) : forced_pendulum(m, g, l);
    }
    if (name == "flywheel") {
        only_keys(p, name, {"I_rot"});
        return flywheel(param(p, "I_rot", 1));
    }
    if (name == "tank") {
        only_keys(p, name, {"C"});
        return tank(param(p, "C", 1));
    }
    if (name == "hovercar") {
        only_keys(p, name, {"m", "I", "R"});
        return hovercar(param(p, "m", 1), param(p, "I", 1), param(p, "R", 1));
    }
    throw DomainError("unknown port-Hamiltonian component '" + name + "'");
}

DiracRelation library_relation(const std::string& name, const Params& p) {
    if (name == "motor") {
        only_keys(p, name, {"kappa"});
        return motor(io::rat_from_double(param(p, "kappa", 1)));
    }
    if (name == "pump") {
        only_keys(p, name, {"rho"});
        return pump(io::rat_from_double(param(p, "rho", 1)));
    }
    if (name == "transformer") {
        only_keys(p, name, {"ratio"});
        return transformer(io::rat_from_double(param(p, "ratio", 1)));
    }
    throw DomainError("unknown relation component '" + name + "'");
}

} // namespace dirac::ph
