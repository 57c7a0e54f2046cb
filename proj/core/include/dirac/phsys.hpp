#pragma once

// Port-Hamiltonian systems in floating point.
//
// The connecting Dirac relation at a state x is held in kernel form
//     D_x = { (ξ, φ, b) : F ξ + E φ + G b = 0 },
// with ξ ∈ T_xX, φ ∈ T*_xX and b the boundary values. The boundary is a list of
// scalar ports, each 𝔹¹ or its dual, laid out as (e₁, f₁, e₂, f₂, …).

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dirac/diracrel.hpp"

namespace dirac::ph {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Scalar ports; dual[i] marks port i as 𝔹̄¹ (power counted outwards).
struct Boundary {
    std::vector<bool> dual;

    std::size_t ports() const noexcept { return dual.size(); }
    std::size_t dim() const noexcept { return 2 * dual.size(); }
    /// Σ ±eᵢfᵢ.
    double power(const VectorXd& b) const;
    BondSpace bond_space() const;
    static Boundary plain(std::size_t ports) { return {std::vector<bool>(ports, false)}; }

    friend bool operator==(const Boundary&, const Boundary&) = default;
};

/// Inverse of bond_space() for sums of scalar ports; throws DimensionError otherwise.
Boundary boundary_of(const BondSpace& b);
Boundary concat(const Boundary& a, const Boundary& b);

struct KernelRep {
    MatrixXd F;  ///< k × n
    MatrixXd E;  ///< k × n
    MatrixXd G;  ///< k × boundary dim

    MatrixXd stacked() const;
};

/// ‖M Q Mᵀ‖ / ‖M‖² with M = [F E G] and Q the inverse of the power form on
/// (T ⊕ T*)‾ ⊕ B. Zero exactly when the kernel is isotropic.
double isotropy_residual(const KernelRep& k, const Boundary& boundary);

/// Throws DiracCheckError unless k has n + ports rows, full row rank and a small isotropy residual.
void check_kernel(const KernelRep& k, std::size_t state_dim, const Boundary& boundary, double tol = 1e-8);

struct PHSystem {
    std::string name;
    std::size_t state_dim = 0;
    Boundary boundary;
    std::function<double(const VectorXd&)> H;
    std::function<VectorXd(const VectorXd&)> grad_H;
    std::function<KernelRep(const VectorXd&)> D;
    /// Optional open box (lo, hi) per state coordinate; empty means all of ℝⁿ.
    std::vector<std::pair<double, double>> domain;

    bool in_domain(const VectorXd& x) const;
};

/// Boundary relation B ⇸ B' held as { (b, b') : K_dom b + K_cod b' = 0 }.
struct PortRelation {
    Boundary dom;
    Boundary cod;
    MatrixXd K_dom;
    MatrixXd K_cod;
};

/// Float kernel form of an exact Dirac relation between sums of scalar ports.
PortRelation port_relation(const DiracRelation& r);

/// (X, H, R ∘ D): state and Hamiltonian unchanged, boundary becomes R's codomain.
PHSystem ph_apply_relation(const PHSystem& sys, const PortRelation& r);
PHSystem ph_apply_relation(const PHSystem& sys, const DiracRelation& r);

/// (X_a × X_b, H_a + H_b, D_a ⊕ D_b).
PHSystem ph_tensor(const PHSystem& a, const PHSystem& b);
/// (ℝ⁰, 0, 𝔹⁰).
PHSystem ph_unit();

/// Commanded boundary variable for one port: its effort or its flow as a function of time.
struct PortInput {
    enum class Kind { effort, flow };
    Kind kind = Kind::effort;
    std::function<double(double)> value;

    static PortInput effort(std::function<double(double)> v) { return {Kind::effort, std::move(v)}; }
    static PortInput flow(std::function<double(double)> v) { return {Kind::flow, std::move(v)}; }
};

enum class Scheme { rk4, midpoint };

struct Trajectory {
    std::vector<double> times;
    std::vector<VectorXd> states;
    std::vector<VectorXd> boundary;  ///< (e₁, f₁, …) per grid point
    std::vector<double> energies;
    double max_compatibility_residual = 0;
};

/// The rates and boundary values determined by the relation at (x, t).
struct StepSolution {
    VectorXd xi;
    VectorXd b;
    double residual = 0;  ///< ‖F ξ + E ∇H + G b‖
};

/// Solves F ξ + G_free b_free = −(E ∇H(x) + G_cmd u(t)). Throws SolverError when ξ is
/// not unique (underdetermined) or no solution exists (overdetermined).
StepSolution solve_step(const PHSystem& sys, const std::vector<PortInput>& inputs, const VectorXd& x, double t);

Trajectory simulate(const PHSystem& sys, const std::vector<PortInput>& inputs, const VectorXd& x0, double t0,
                    double t1, double dt, Scheme scheme = Scheme::rk4);

/// max_k |H(x_k) − H(x_0) − ∫ π(b)| with the integral by the trapezoidal rule.
double energy_audit(const PHSystem& sys, const Trajectory& traj);

/// CSV: t, x…, e/f per port, H.
std::string trajectory_csv(const PHSystem& sys, const Trajectory& traj);

struct MorphismReport {
    bool passed = true;
    double max_energy_gap = 0;
    double max_relation_residual = 0;
    std::vector<std::string> failures;
};

/// Forwards morphism f : src → dst: H = H'∘f and (ξ, f*φ, b) ∈ D_x ⇒ (f_*ξ, φ, b) ∈ D'_{f(x)}
/// at every sample state.
MorphismReport check_forwards_morphism(const std::function<VectorXd(const VectorXd&)>& f,
                                       const std::function<MatrixXd(const VectorXd&)>& jacobian, const PHSystem& src,
                                       const PHSystem& dst, const std::vector<VectorXd>& samples, double tol = 1e-8);

/// Max relative gap between grad_H and central differences of H over the samples.
double gradient_check(const PHSystem& sys, const std::vector<VectorXd>& samples, double h = 1e-6);

/// Row-reduced copy of the kernel (pivoting on ξ, then φ, then b); for display.
KernelRep reduced_kernel(const KernelRep& k, double tol = 1e-12);

} // namespace dirac::ph
